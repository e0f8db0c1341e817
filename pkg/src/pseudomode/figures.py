"""Built-in figure presets and the figure bundle writer."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import dynamics, svgplot
from .scenario import ConfigError, ScenarioConfig, compute, format_value, write_csv
from .spectral import SpectralModel

THETA = math.pi / 3
NEAR, FAR = 0.2, 8.0

QUANTITY_AXES = {
    "discord": ("Omega t", "quantum discord (bits)"),
    "trace_distance": ("Omega t", "trace distance"),
    "spectral_density": ("(omega - omega_c) / Omega", "D(omega) * Omega"),
}

TIME_EXTENT_NOTE = (
    "Time axes use the package defaults (weak: 0..10/Omega, 1000 samples; "
    "strong: 0..30/Omega, 3000 samples); the original figures do not state their extents. "
    "Two-Lorentzian weights default to 1/2 each and band-gap weights to the perfect-gap pair."
)


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    quantity: str
    scenarios: tuple[ScenarioConfig, ...]
    title: str = ""

    def __post_init__(self):
        if self.quantity not in QUANTITY_AXES:
            raise ConfigError(f"unknown figure quantity {self.quantity!r}")
        grids = {(s.time_start, s.time_end, s.samples) for s in self.scenarios}
        if len(grids) > 1 and self.quantity != "spectral_density":
            raise ConfigError(f"scenarios in {self.figure_id} use different time grids")
        names = [s.name for s in self.scenarios]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate series names in {self.figure_id}")

    @property
    def labels(self) -> list[str]:
        return [s.name for s in self.scenarios]

    @classmethod
    def from_dict(cls, d: dict) -> "FigureSpec":
        try:
            scen = tuple(ScenarioConfig.from_dict(s) for s in d["scenarios"])
            return cls(d["figure_id"], d["quantity"], scen, d.get("title", ""))
        except KeyError as exc:
            raise ConfigError(f"figure spec is missing {exc}") from None

    def to_dict(self) -> dict:
        return {
            "figure_id": self.figure_id,
            "quantity": self.quantity,
            "title": self.title,
            "scenarios": [s.to_dict() for s in self.scenarios],
        }


def _sl_sq(gamma):
    return SpectralModel.single_lorentzian(gamma), SpectralModel.squared_lorentzian(gamma)


def _tl_bg(g1, g2):
    return SpectralModel.two_lorentzian(g1, g2), SpectralModel.band_gap(g1, g2)


REGIMES = {
    "weak": {"pair_a": _sl_sq(11.0), "pair_b": _tl_bg(11.0, 1.0)},
    "strong": {"pair_a": _sl_sq(0.11), "pair_b": _tl_bg(0.11, 0.01)},
}


def _dynamic(fig_id, quantity, regime, pair, detuning, title):
    output = quantity
    scen = tuple(
        ScenarioConfig(m.label, m, detuning=detuning, theta=THETA, regime=regime, outputs=(output,))
        for m in REGIMES[regime][pair]
    )
    return FigureSpec(fig_id, quantity, scen, title)


def _spectra(fig_id, regime, pairs, span, samples, title):
    scen = tuple(
        ScenarioConfig(m.label, m, regime=regime, outputs=("spectral_density",), omega_range=(-span, span, samples))
        for pair in pairs
        for m in REGIMES[regime][pair]
    )
    return FigureSpec(fig_id, "spectral_density", scen, title)


def _build_presets() -> dict[str, FigureSpec]:
    p = {}
    p["fig1a"] = _dynamic("fig1a", "discord", "weak", "pair_a", 0.0, "Discord, SL vs SQ, weak, resonant")
    p["fig1b"] = _dynamic("fig1b", "discord", "strong", "pair_a", 0.0, "Discord, SL vs SQ, strong, resonant")
    p["fig1c"] = _dynamic("fig1c", "discord", "weak", "pair_b", 0.0, "Discord, TL vs BG, weak, resonant")
    p["fig1d"] = _dynamic("fig1d", "discord", "strong", "pair_b", 0.0, "Discord, TL vs BG, strong, resonant")
    p["fig2a"] = _dynamic("fig2a", "discord", "weak", "pair_a", NEAR, "Discord, SL vs SQ, weak, Delta = 0.2")
    p["fig2b"] = _dynamic("fig2b", "discord", "weak", "pair_a", FAR, "Discord, SL vs SQ, weak, Delta = 8")
    p["fig2c"] = _dynamic("fig2c", "discord", "weak", "pair_b", NEAR, "Discord, TL vs BG, weak, Delta = 0.2")
    p["fig2d"] = _dynamic("fig2d", "discord", "weak", "pair_b", FAR, "Discord, TL vs BG, weak, Delta = 8")
    p["fig3a"] = _spectra("fig3a", "weak", ("pair_a",), 30.0, 1201, "Spectral density, SL vs SQ, weak")
    p["fig3b"] = _spectra("fig3b", "weak", ("pair_b",), 30.0, 1201, "Spectral density, TL vs BG, weak")
    p["fig4a"] = _dynamic("fig4a", "discord", "strong", "pair_a", NEAR, "Discord, SL vs SQ, strong, Delta = 0.2")
    p["fig4b"] = _dynamic("fig4b", "discord", "strong", "pair_a", FAR, "Discord, SL vs SQ, strong, Delta = 8")
    p["fig4c"] = _dynamic("fig4c", "discord", "strong", "pair_b", NEAR, "Discord, TL vs BG, strong, Delta = 0.2")
    p["fig4d"] = _dynamic("fig4d", "discord", "strong", "pair_b", FAR, "Discord, TL vs BG, strong, Delta = 8")
    p["fig5"] = _spectra("fig5", "strong", ("pair_a", "pair_b"), 2.0, 401, "Spectral density, strong regime")
    p["fig6a"] = _dynamic("fig6a", "trace_distance", "strong", "pair_a", FAR, "Trace distance, SL vs SQ, Delta = 8")
    p["fig6b"] = _dynamic("fig6b", "trace_distance", "strong", "pair_b", FAR, "Trace distance, TL vs BG, Delta = 8")
    return p


PRESETS = _build_presets()


def resolve(figure_id: str) -> list[str]:
    """Preset ids selected by ``figure_id``: an exact id, a figure number such as ``fig3``, or ``all``."""
    if figure_id == "all":
        return list(PRESETS)
    if figure_id in PRESETS:
        return [figure_id]
    panels = [k for k in PRESETS if k[:-1] == figure_id]
    if not panels:
        raise ConfigError(f"unknown figure preset {figure_id!r}; choose from {list(PRESETS)} or 'all'")
    return panels


def _compute_member(args):
    config, tol, fock = args
    return compute(config, tol, fock)


def reproduce_figure(spec: FigureSpec, out_dir, tol=dynamics.DEFAULT_TOL, fock=1, jobs=1) -> dict[str, Path]:
    """Write ``<id>.svg``, one CSV per series and ``<id>.json`` metadata under ``out_dir/<id>/``."""
    if not spec.scenarios:
        raise ConfigError(f"figure {spec.figure_id!r} has no scenarios")
    work = [(s, tol, fock) for s in spec.scenarios]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_compute_member, work))
    else:
        results = [_compute_member(w) for w in work]

    target = Path(out_dir) / spec.figure_id
    target.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}
    curves = {}
    for res in results:
        header, x, ys = res.series(spec.quantity)
        written[res.config.name] = write_csv(target / f"{res.config.name}.csv", header, x, ys)
        curves[res.config.name] = (x, ys[0])

    xlabel, ylabel = QUANTITY_AXES[spec.quantity]
    svg = svgplot.line_chart(curves, spec.title or spec.figure_id, xlabel, ylabel)
    svg_path = target / f"{spec.figure_id}.svg"
    svg_path.write_text(svg, encoding="utf-8", newline="\n")
    written["svg"] = svg_path

    meta = spec.to_dict()
    meta["integrator_tol"] = tol
    meta["fock_cutoff"] = fock
    meta["note"] = TIME_EXTENT_NOTE
    if spec.quantity == "trace_distance":
        meta["non_markovianity"] = {r.config.name: format_value(r.non_markov.measure) for r in results}
    meta_path = target / f"{spec.figure_id}.json"
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    written["meta"] = meta_path
    return written
