"""Scenario configuration and the spectral -> dynamics -> correlations pipeline."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import correlations, dynamics, spectral
from .spectral import SpectralModel

OUTPUTS = ("discord", "trace_distance", "non_markovianity", "spectral_density", "populations")
SWEEP_PARAMS = ("detuning", "theta", "gamma", "gamma1", "gamma2", "w1")
DEFAULT_OMEGA_RANGE = (-30.0, 30.0, 1201)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    model: SpectralModel
    detuning: float = 0.0
    theta: float = math.pi / 3
    regime: str = ""
    time_start: float | None = None
    time_end: float | None = None
    samples: int | None = None
    outputs: tuple[str, ...] = ("discord",)
    output_path: str | None = None
    omega_range: tuple[float, float, int] = DEFAULT_OMEGA_RANGE
    coupling: float = 1.0

    def __post_init__(self):
        if self.regime in ("weak", "strong"):
            start, stop, n = {"weak": dynamics.WEAK_GRID, "strong": dynamics.STRONG_GRID}[self.regime]
            for key, default in (("time_start", start), ("time_end", stop), ("samples", n)):
                if getattr(self, key) is None:
                    object.__setattr__(self, key, default)
        if None in (self.time_start, self.time_end, self.samples):
            raise ConfigError("time_start, time_end and samples are required unless regime is weak/strong")
        if not self.time_end > self.time_start >= 0:
            raise ConfigError(f"need time_end > time_start >= 0, got {self.time_start}, {self.time_end}")
        if int(self.samples) != self.samples or self.samples < 2:
            raise ConfigError(f"samples must be an integer >= 2, got {self.samples}")
        if not 0.0 <= self.theta <= math.pi:
            raise ConfigError(f"theta must lie in [0, pi], got {self.theta}")
        bad = set(self.outputs) - set(OUTPUTS)
        if bad:
            raise ConfigError(f"unknown outputs {sorted(bad)}; choose from {list(OUTPUTS)}")
        if not self.name or any(c in self.name for c in "/\\,\n"):
            raise ConfigError(f"invalid scenario name {self.name!r}")
        lo, hi, n = self.omega_range
        if not hi > lo or int(n) < 2:
            raise ConfigError(f"bad omega_range {self.omega_range}")
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "omega_range", (float(lo), float(hi), int(n)))

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.time_start, self.time_end, self.samples)

    @property
    def omegas(self) -> np.ndarray:
        lo, hi, n = self.omega_range
        return np.linspace(lo, hi, n)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigError(f"unknown scenario keys {sorted(unknown)}")
        if "model" not in d or "name" not in d:
            raise ConfigError("scenario needs 'name' and 'model'")
        d["model"] = SpectralModel.from_dict(d["model"])
        if "outputs" in d:
            d["outputs"] = tuple(d["outputs"])
        if "omega_range" in d:
            d["omega_range"] = tuple(d["omega_range"])
        return cls(**d)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "model": self.model.to_dict(),
            "detuning": self.detuning,
            "theta": self.theta,
            "regime": self.regime,
            "time_start": self.time_start,
            "time_end": self.time_end,
            "samples": self.samples,
            "outputs": list(self.outputs),
            "output_path": self.output_path,
            "omega_range": list(self.omega_range),
            "coupling": self.coupling,
        }

    def with_param(self, param: str, value: float) -> "ScenarioConfig":
        if param not in SWEEP_PARAMS:
            raise ConfigError(f"cannot sweep {param!r}; choose from {list(SWEEP_PARAMS)}")
        if param in ("detuning", "theta"):
            return replace(self, **{param: float(value)})
        return replace(self, model=self.model.with_params(**{param: float(value)}))


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    times: np.ndarray
    amplitude: np.ndarray | None = None
    discord: np.ndarray | None = None
    trace_distance: np.ndarray | None = None
    non_markov: correlations.NonMarkovResult | None = None
    omegas: np.ndarray | None = None
    density: np.ndarray | None = None
    excited_pop: np.ndarray | None = None
    total_excitation: np.ndarray | None = None

    def series(self, output: str) -> tuple[list[str], np.ndarray, list[np.ndarray]]:
        """Header, x column and y columns for one requested output."""
        name = self.config.name
        if output == "discord":
            return ["omega_t", name], self.times, [self.discord]
        if output == "trace_distance":
            return ["omega_t", name], self.times, [self.trace_distance]
        if output == "non_markovianity":
            return ["omega_t", name], self.times, [self.non_markov.running(self.times)]
        if output == "spectral_density":
            return ["omega_minus_omega_c", name], self.omegas, [self.density]
        if output == "populations":
            return (
                ["omega_t", f"{name}_atom_excited", f"{name}_total_excitation"],
                self.times,
                [self.excited_pop, self.total_excitation],
            )
        raise ConfigError(f"unknown output {output!r}")


def compute(config: ScenarioConfig, tol: float = dynamics.DEFAULT_TOL, fock: int = 1, need=None) -> ScenarioResult:
    """Run the pipeline for the quantities in ``need`` (default: the config outputs)."""
    need = set(config.outputs if need is None else need)
    times = config.times
    res = ScenarioResult(config, times)
    if "spectral_density" in need:
        res.omegas = config.omegas
        res.density = np.asarray(spectral.density(config.model, config.omegas + config.model.omega_c))
    if not need - {"spectral_density"}:
        return res

    network = spectral.to_pseudomodes(config.model, config.coupling)
    system = dynamics.build_system(network, config.detuning, fock)

    if "discord" in need:
        rho0 = dynamics.initial_state(system, np.array([1.0, 1.0]) / math.sqrt(2))
        b = dynamics.evolve(system, rho0, times, tol).b_amplitude
        res.amplitude = b
        states = [correlations.assemble_two_qubit(config.theta, bk) for bk in b]
        res.discord = np.array([r.discord for r in correlations.discord_batch(states)])

    if need & {"trace_distance", "non_markovianity", "populations"}:
        rec_e = dynamics.evolve(system, dynamics.initial_state(system, "e"), times, tol, store_states=True)
        rec_g = dynamics.evolve(system, dynamics.initial_state(system, "g"), times, tol, store_states=True)
        res.trace_distance = correlations.trace_distance_series(rec_e, rec_g)
        res.non_markov = correlations.non_markovianity(res.trace_distance, times)
        res.excited_pop = rec_e.atom_excited_pop
        res.total_excitation = rec_e.total_excitation
    return res


def format_value(v: float) -> str:
    s = f"{v:.12g}"
    return "0" if s == "-0" else s


def write_csv(path: Path, header: list[str], x: np.ndarray, ys: list[np.ndarray]) -> Path:
    lines = [",".join(header)]
    for row in zip(x, *ys):
        lines.append(",".join(format_value(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def run_scenario(config: ScenarioConfig, out_dir=None, tol=dynamics.DEFAULT_TOL, fock=1) -> dict[str, Path]:
    """Run one scenario and write ``<name>_<output>.csv`` per requested output."""
    out = Path(out_dir if out_dir is not None else config.output_path or "out")
    result = compute(config, tol, fock)
    out.mkdir(parents=True, exist_ok=True)
    written = {}
    for output in config.outputs:
        header, x, ys = result.series(output)
        written[output] = write_csv(out / f"{config.name}_{output}.csv", header, x, ys)
    return written


def sweep_point(args) -> tuple[float, float]:
    config, tol, fock = args
    res = compute(config, tol, fock, need={"discord", "non_markovianity"})
    return float(res.discord[-1]), float(res.non_markov.measure)
