"""Spectral densities of the four reservoir families and their pseudomode networks.

Every family is centred on ``omega_c``. All rates and frequencies are in
units of the atom-pseudomode coupling, so a typical call uses ``coupling=1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError

WEIGHT_TOL = 1e-9
# rates this close below zero are rounding residue of the perfect-gap weights
RATE_SNAP = 1e-12


class Family(str, enum.Enum):
    SINGLE_LORENTZIAN = "single_lorentzian"
    SQUARED_LORENTZIAN = "squared_lorentzian"
    TWO_LORENTZIAN = "two_lorentzian"
    BAND_GAP = "band_gap"

    @property
    def short(self) -> str:
        return _SHORT[self]


_SHORT = {
    Family.SINGLE_LORENTZIAN: "SL",
    Family.SQUARED_LORENTZIAN: "SQ",
    Family.TWO_LORENTZIAN: "TL",
    Family.BAND_GAP: "BG",
}
_BY_SHORT = {v: k for k, v in _SHORT.items()}


def parse_family(name: str) -> Family:
    if name.upper() in _BY_SHORT:
        return _BY_SHORT[name.upper()]
    try:
        return Family(name.lower())
    except ValueError:
        raise ModelError(f"unknown spectral family {name!r}") from None


def lorentzian(x, width):
    """Unit-area-times-2pi Lorentzian of full width ``width`` at offset ``x``."""
    return width / (np.square(x) + (width / 2) ** 2)


@dataclass(frozen=True)
class SpectralModel:
    """One reservoir: a family tag plus the parameters that family uses.

    Widths and weights a family does not use stay ``None``. Weights left
    unset on construction get the documented defaults: an even split for the
    two-Lorentzian family, and the perfect-gap pair
    ``w1 = g1/(g1 - g2)``, ``w2 = g2/(g1 - g2)`` for the band gap.
    """

    family: Family
    omega_c: float = 0.0
    gamma: float | None = None
    gamma1: float | None = None
    gamma2: float | None = None
    w1: float | None = None
    w2: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", parse_family(self.family) if isinstance(self.family, str) else self.family)
        fam = self.family
        if fam in (Family.SINGLE_LORENTZIAN, Family.SQUARED_LORENTZIAN):
            _require_positive(gamma=self.gamma)
            if any(v is not None for v in (self.gamma1, self.gamma2, self.w1, self.w2)):
                raise ModelError(f"{fam.value} takes only gamma")
            return

        _require_positive(gamma1=self.gamma1, gamma2=self.gamma2)
        if self.gamma is not None:
            raise ModelError(f"{fam.value} takes gamma1/gamma2, not gamma")
        w1, w2 = self.w1, self.w2
        if fam is Family.TWO_LORENTZIAN:
            if w1 is None and w2 is None:
                w1 = w2 = 0.5
            elif w2 is None:
                w2 = 1.0 - w1
            elif w1 is None:
                w1 = 1.0 - w2
            if abs(w1 + w2 - 1.0) > WEIGHT_TOL or not (0.0 < w1 < 1.0 and 0.0 < w2 < 1.0):
                raise ModelError(f"two-Lorentzian weights must lie in (0,1) and sum to 1, got {w1}, {w2}")
        else:
            if not self.gamma2 < self.gamma1:
                raise ModelError(f"band gap needs gamma2 < gamma1, got {self.gamma2} >= {self.gamma1}")
            if w1 is None and w2 is None:
                span = self.gamma1 - self.gamma2
                w1, w2 = self.gamma1 / span, self.gamma2 / span
            elif w2 is None:
                w2 = w1 - 1.0
            elif w1 is None:
                w1 = w2 + 1.0
            if abs(w1 - w2 - 1.0) > WEIGHT_TOL or not w2 > 0.0:
                raise ModelError(f"band-gap weights need w1 - w2 = 1 and w2 > 0, got {w1}, {w2}")
        object.__setattr__(self, "w1", float(w1))
        object.__setattr__(self, "w2", float(w2))

    @classmethod
    def single_lorentzian(cls, gamma, omega_c=0.0):
        return cls(Family.SINGLE_LORENTZIAN, omega_c, gamma=gamma)

    @classmethod
    def squared_lorentzian(cls, gamma, omega_c=0.0):
        return cls(Family.SQUARED_LORENTZIAN, omega_c, gamma=gamma)

    @classmethod
    def two_lorentzian(cls, gamma1, gamma2, w1=None, w2=None, omega_c=0.0):
        return cls(Family.TWO_LORENTZIAN, omega_c, gamma1=gamma1, gamma2=gamma2, w1=w1, w2=w2)

    @classmethod
    def band_gap(cls, gamma1, gamma2, w1=None, w2=None, omega_c=0.0):
        return cls(Family.BAND_GAP, omega_c, gamma1=gamma1, gamma2=gamma2, w1=w1, w2=w2)

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralModel":
        d = dict(d)
        family = d.pop("family", None)
        if family is None:
            raise ModelError("model entry needs a 'family'")
        unknown = set(d) - {"omega_c", "gamma", "gamma1", "gamma2", "w1", "w2"}
        if unknown:
            raise ModelError(f"unknown model parameters {sorted(unknown)}")
        return cls(parse_family(family), **d)

    def to_dict(self) -> dict:
        out = {"family": self.family.value, "omega_c": self.omega_c}
        for key in ("gamma", "gamma1", "gamma2", "w1", "w2"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out

    def with_params(self, **changes) -> "SpectralModel":
        """Copy with some parameters replaced; default weights are re-derived."""
        d = self.to_dict()
        if {"gamma1", "gamma2"} & set(changes) and "w1" not in changes and "w2" not in changes:
            d.pop("w1", None)
            d.pop("w2", None)
        if "w1" in changes:
            d.pop("w2", None)
        d.update(changes)
        return SpectralModel.from_dict(d)

    @property
    def label(self) -> str:
        return self.family.short


def _require_positive(**params):
    for name, val in params.items():
        if val is None or not math.isfinite(val) or val <= 0:
            raise ModelError(f"{name} must be a positive number, got {val!r}")


def band_gap_rates(model: SpectralModel) -> tuple[float, float]:
    """Pseudomode decay rates of a band-gap model; raises if one is negative."""
    g1, g2, w1, w2 = model.gamma1, model.gamma2, model.w1, model.w2
    r1 = w1 * g2 - w2 * g1
    r2 = w1 * g1 - w2 * g2
    scale = max(w1 * g1, w2 * g2)
    if -RATE_SNAP * scale <= r1 < 0.0:
        r1 = 0.0
    if r1 < 0.0 or r2 < 0.0:
        raise ModelError(
            f"band-gap parameters give negative pseudomode rates ({r1:.6g}, {r2:.6g}); "
            "the spectral density would go negative at the centre"
        )
    return r1, r2


def density(model: SpectralModel, omega):
    """Spectral density D(omega). Accepts scalars or arrays."""
    x = np.asarray(omega, dtype=float) - model.omega_c
    fam = model.family
    if fam is Family.SINGLE_LORENTZIAN:
        d = lorentzian(x, model.gamma)
    elif fam is Family.SQUARED_LORENTZIAN:
        g = model.gamma
        d = (g**3 / 2) / (np.square(x) + (g / 2) ** 2) ** 2
    elif fam is Family.TWO_LORENTZIAN:
        d = model.w1 * lorentzian(x, model.gamma1) + model.w2 * lorentzian(x, model.gamma2)
    else:
        band_gap_rates(model)
        d = model.w1 * lorentzian(x, model.gamma1) - model.w2 * lorentzian(x, model.gamma2)
        # the perfect-gap zero at the centre is exact; cancel its rounding residue
        d = np.where(d < 0.0, 0.0, d)
    return d if d.ndim else float(d)


@dataclass(frozen=True)
class PseudomodeNetwork:
    """Discrete atom + damped-mode system reproducing a reservoir exactly.

    ``mode_freqs`` are measured from the reservoir centre, which is zero for
    every family handled here; the atom-centre detuning is applied later when
    the Hamiltonian is built.
    """

    mode_freqs: tuple[float, ...]
    decay_rates: tuple[float, ...]
    atom_couplings: tuple[complex, ...]
    intermode_coupling: float = 0.0
    source: SpectralModel | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.mode_freqs)
        if n not in (1, 2) or len(self.decay_rates) != n or len(self.atom_couplings) != n:
            raise ModelError("a network has one or two modes with one rate and one coupling each")
        if any(r < 0 for r in self.decay_rates):
            raise ModelError(f"decay rates must be non-negative, got {self.decay_rates}")
        if n == 1 and self.intermode_coupling != 0.0:
            raise ModelError("a single-mode network has no inter-mode coupling")

    @property
    def mode_count(self) -> int:
        return len(self.mode_freqs)


def to_pseudomodes(model: SpectralModel, coupling: float = 1.0) -> PseudomodeNetwork:
    """Pseudomode network whose atom dynamics equals that of ``model``."""
    fam = model.family
    if fam is Family.SINGLE_LORENTZIAN:
        return PseudomodeNetwork((0.0,), (model.gamma,), (coupling,), 0.0, model)
    if fam is Family.TWO_LORENTZIAN:
        return PseudomodeNetwork(
            (0.0, 0.0),
            (model.gamma1, model.gamma2),
            (coupling * math.sqrt(model.w1), coupling * math.sqrt(model.w2)),
            0.0,
            model,
        )
    if fam is Family.BAND_GAP:
        r1, r2 = band_gap_rates(model)
        v = math.sqrt(model.w1 * model.w2) * (model.gamma1 - model.gamma2) / 2
        return PseudomodeNetwork((0.0, 0.0), (r1, r2), (0.0, coupling), v, model)
    # squared Lorentzian: the master equation carries Gamma (not Gamma/2) in
    # front of the Lindblad bracket, i.e. rate 2*Gamma in the uniform convention
    g = model.gamma
    return PseudomodeNetwork((0.0, 0.0), (2 * g, 0.0), (0.0, coupling), g / 2, model)
