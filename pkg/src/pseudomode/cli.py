"""Command line entry point.

    pseudomode run <config.json>
    pseudomode figure <fig1a..fig6b|fig1..fig6|all>
    pseudomode sweep <config.json> --param <name> --values <v1,v2,...>
    pseudomode dump-preset <id>

Output goes to ``--out``, else ``$PSEUDOMODE_OUT``, else ``./out``.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import dynamics, figures
from .errors import ConsistencyError, IntegrationError, ModelError
from .scenario import SWEEP_PARAMS, ConfigError, ScenarioConfig, format_value, run_scenario, sweep_point

log = logging.getLogger("pseudomode")


def output_dir(flag: str | None) -> Path:
    return Path(flag or os.environ.get("PSEUDOMODE_OUT") or "out")


def load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None


def sweep(base: ScenarioConfig, param: str, values, out_dir, tol=dynamics.DEFAULT_TOL, fock=1, jobs=None) -> Path:
    """One scenario per value; writes ``<name>_sweep_<param>.csv`` with the
    final-time discord and the BLP measure of each run."""
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"cannot sweep {param!r}; choose from {list(SWEEP_PARAMS)}")
    configs = [base.with_param(param, v) for v in values]
    work = [(c, tol, fock) for c in configs]
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_point, work))
    else:
        rows = [sweep_point(w) for w in work]

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{base.name}_sweep_{param}.csv"
    lines = [f"{param},discord_final,non_markovianity"]
    lines += [",".join(format_value(float(x)) for x in (v, qd, nm)) for v, (qd, nm) in zip(values, rows)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def parse_values(text: str) -> list[float]:
    if not text.strip():
        return []
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"--values must be comma-separated numbers, got {text!r}") from None


def _cmd_run(args):
    doc = load_json(args.config)
    out = output_dir(args.out)
    if "scenarios" in doc:
        spec = figures.FigureSpec.from_dict(doc)
        written = figures.reproduce_figure(spec, out, args.tol, args.fock, args.jobs)
    else:
        config = ScenarioConfig.from_dict(doc)
        if args.out is None and config.output_path:
            out = Path(config.output_path)
        written = run_scenario(config, out, args.tol, args.fock)
    for path in written.values():
        print(path)


def _cmd_figure(args):
    out = output_dir(args.out)
    for fig_id in figures.resolve(args.figure):
        written = figures.reproduce_figure(figures.PRESETS[fig_id], out, args.tol, args.fock, args.jobs)
        print(written["svg"])


def _cmd_sweep(args):
    config = ScenarioConfig.from_dict(load_json(args.config))
    path = sweep(config, args.param, parse_values(args.values), output_dir(args.out), args.tol, args.fock, args.jobs)
    print(path)


def _cmd_dump(args):
    ids = figures.resolve(args.preset)
    docs = [figures.PRESETS[i].to_dict() for i in ids]
    json.dump(docs[0] if len(docs) == 1 else docs, sys.stdout, indent=2)
    sys.stdout.write("\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default: $PSEUDOMODE_OUT or ./out)")
    common.add_argument("--tol", type=float, default=dynamics.DEFAULT_TOL, help="integrator tolerance")
    common.add_argument("--fock", type=int, default=1, help="Fock cutoff per pseudomode")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: 1, sweep: all cores)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="pseudomode", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a scenario or figure JSON file")
    p.add_argument("config")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("figure", parents=[common], help="reproduce a built-in figure")
    p.add_argument("figure")
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("sweep", parents=[common], help="sweep one parameter of a scenario")
    p.add_argument("config")
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("dump-preset", help="print a built-in figure preset as JSON")
    p.add_argument("preset")
    p.set_defaults(func=_cmd_dump)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING)
    if getattr(args, "jobs", None) is None and args.command in ("run", "figure"):
        args.jobs = 1
    try:
        args.func(args)
    except (ConfigError, ModelError, IntegrationError, ConsistencyError, ValueError, OSError) as exc:
        print(f"pseudomode: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
