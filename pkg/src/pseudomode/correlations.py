"""Two-qubit X states, quantum discord, trace distance and BLP non-Markovianity."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qmath
from .dynamics import EvolutionRecord
from .errors import ConsistencyError, DimensionError, NegativeEigenvalueError

POP_TOL = 1e-9
PSD_TOL = 1e-10
GOLDEN = (math.sqrt(5) - 1) / 2

POLAR_GRID = 64
AZIMUTH_GRID = 32
ANGLE_TOL = 1e-8
DESCENT_PASSES = 3

_PAULI = np.stack([qmath.SIGMA_X, qmath.SIGMA_Y, qmath.SIGMA_Z])


@dataclass(frozen=True)
class XState:
    """Two-qubit X state in the basis ``gg, ge, eg, ee``."""

    r11: float
    r22: float
    r33: float
    r44: float
    r14: complex = 0.0

    def __post_init__(self):
        pops = (self.r11, self.r22, self.r33, self.r44)
        if abs(sum(pops) - 1.0) > POP_TOL:
            raise ValueError(f"populations sum to {sum(pops)!r}, not 1")
        if min(pops) < -PSD_TOL:
            raise NegativeEigenvalueError(f"negative population {min(pops):.3e}")
        if abs(self.r22 - self.r33) > POP_TOL:
            raise ValueError("X state must be symmetric: r22 == r33")
        if abs(self.r14) ** 2 > self.r11 * self.r44 + PSD_TOL:
            raise NegativeEigenvalueError("coherence |r14| exceeds sqrt(r11 r44)")

    def matrix(self) -> np.ndarray:
        rho = np.diag([self.r11, self.r22, self.r33, self.r44]).astype(complex)
        rho[0, 3] = self.r14
        rho[3, 0] = np.conj(self.r14)
        return rho

    def relabelled(self) -> "XState":
        """Swap |g> and |e> on both qubits."""
        return XState(self.r44, self.r33, self.r22, self.r11, np.conj(self.r14))


def assemble_two_qubit(theta: float, b: complex) -> XState:
    """State of two atoms prepared in ``cos(theta)|gg> + sin(theta)|ee>`` after
    each has gone through its own amplitude-damping channel with excited-state
    amplitude ``b``."""
    b = complex(b)
    if abs(b) > 1.0 + 1e-9:
        raise ValueError(f"|b| = {abs(b):.12g} exceeds 1")
    if abs(b) > 1.0:
        b /= abs(b)
    p = abs(b) ** 2
    s = math.sin(theta) ** 2
    r44 = s * p * p
    r22 = s * p * (1.0 - p)
    r11 = 1.0 - 2.0 * r22 - r44
    return XState(r11, r22, r22, r44, math.cos(theta) * math.sin(theta) * b**2)


@dataclass(frozen=True)
class DiscordResult:
    discord: float
    classical_correlation: float
    mutual_information: float
    optimal_measurement_angles: tuple[float, float]


def _bloch_data(rho: np.ndarray):
    """Local Bloch vectors and correlation tensor of a batch of 4x4 states.

    ``rho = (1/4) sum_ij c_ij s_i (x) s_j``; returns ``(a, b, C)`` with ``a``
    for qubit A, ``b`` for qubit B and ``C[i, j] = c_ij`` for i, j >= 1.
    """
    r = rho.reshape(-1, 2, 2, 2, 2)
    a = np.einsum("nijkj,ski->ns", r, _PAULI).real
    b = np.einsum("nijil,slj->ns", r, _PAULI).real
    c = np.einsum("nijkl,ski,tlj->nst", r, _PAULI, _PAULI).real
    return a, b, c


def _directions(polar, azimuth):
    st = np.sin(polar)
    return np.stack([st * np.cos(azimuth), st * np.sin(azimuth), np.cos(polar)], axis=-1)


def _xlogx(x):
    x = np.maximum(x, 0.0)
    return np.where(x > 0.0, x * np.log2(np.where(x > 0.0, x, 1.0)), 0.0)


def _conditional_entropy(a, b, c, n):
    """Post-measurement entropy of A given a projective measurement of B along ``n``.

    ``a, b, c`` carry a leading batch axis; ``n`` is ``(batch, k, 3)`` and the
    result is ``(batch, k)``.
    """
    nb = np.einsum("ns,nks->nk", b, n)
    cn = np.einsum("nst,nkt->nks", c, n)
    total = 0.0
    for sign in (1.0, -1.0):
        p = 0.5 * (1.0 + sign * nb)
        radius = np.linalg.norm(a[:, None, :] + sign * cn, axis=-1)
        lam_hi = 0.25 * (1.0 + sign * nb + radius)
        lam_lo = 0.25 * (1.0 + sign * nb - radius)
        total = total - _xlogx(lam_hi) - _xlogx(lam_lo) + _xlogx(p)
    return total


def _golden_min(f, lo, hi, iters):
    """Vectorised golden-section search; ``f`` maps ``(batch,)`` points to values."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x2n = np.where(left, x1, lo + GOLDEN * (hi - lo))
        x1n = np.where(left, hi - GOLDEN * (hi - lo), x2)
        new1, new2 = f(x1n), f(x2n)
        f1, f2 = np.where(left, new1, f2), np.where(left, f1, new2)
        x1, x2 = x1n, x2n
    return 0.5 * (lo + hi)


def _minimise_conditional_entropy(a, b, c):
    """Minimum over measurement directions, returned with its angles."""
    nstate = a.shape[0]

    def cond(polar, azimuth):
        return _conditional_entropy(a, b, c, _directions(polar, azimuth))

    # closed-form X-state candidates: sigma_z and sigma_x measurements
    cand_polar = np.array([0.0, np.pi / 2])
    cand_az = np.array([0.0, 0.0])
    best = cond(np.broadcast_to(cand_polar, (nstate, 2)), np.broadcast_to(cand_az, (nstate, 2)))
    idx = np.argmin(best, axis=1)
    best_val = best[np.arange(nstate), idx]
    best_polar, best_az = cand_polar[idx], cand_az[idx]

    polar = np.linspace(0.0, np.pi, POLAR_GRID)
    azimuth = np.linspace(0.0, 2 * np.pi, AZIMUTH_GRID, endpoint=False)
    pg, ag = (g.ravel() for g in np.meshgrid(polar, azimuth, indexing="ij"))
    grid = cond(np.broadcast_to(pg, (nstate, pg.size)), np.broadcast_to(ag, (nstate, ag.size)))
    gi = np.argmin(grid, axis=1)
    p, q = pg[gi], ag[gi]

    # coordinate descent with golden sections, bracketing one grid cell each way
    dp, dq = polar[1] - polar[0], azimuth[1] - azimuth[0]
    iters = int(math.ceil(math.log(ANGLE_TOL / (2 * dq)) / math.log(GOLDEN)))
    for _ in range(DESCENT_PASSES):
        p = _golden_min(lambda x: cond(x[:, None], q[:, None])[:, 0], p - dp, p + dp, iters)
        q = _golden_min(lambda x: cond(p[:, None], x[:, None])[:, 0], q - dq, q + dq, iters)
    refined = cond(p[:, None], q[:, None])[:, 0]

    take = refined < best_val
    best_val = np.where(take, refined, best_val)
    best_polar = np.where(take, p, best_polar)
    best_az = np.where(take, q, best_az)
    return best_val, best_polar, best_az


def _vn_from_bloch(v):
    r = np.linalg.norm(v, axis=-1)
    return -_xlogx(0.5 * (1 + r)) - _xlogx(0.5 * (1 - r))


def discord_batch(states: Sequence[XState] | np.ndarray) -> list[DiscordResult]:
    """Discord (in bits, measurement on qubit B) for many states at once.

    Accepts ``XState`` objects or an array of 4x4 density matrices.
    """
    if isinstance(states, np.ndarray):
        rho = np.asarray(states, dtype=complex).reshape(-1, 4, 4)
    else:
        rho = np.array([s.matrix() for s in states]).reshape(-1, 4, 4)
    if rho.shape[0] == 0:
        return []
    if np.max(np.abs(rho - qmath.dag(rho))) > qmath.HERMITIAN_TOL:
        raise ValueError("states must be Hermitian")
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < -PSD_TOL:
        raise NegativeEigenvalueError(f"state has eigenvalue {lam.min():.3e}")
    s_ab = -np.sum(_xlogx(lam), axis=1)

    a, b, c = _bloch_data(rho)
    s_a, s_b = _vn_from_bloch(a), _vn_from_bloch(b)
    s_cond, polar, az = _minimise_conditional_entropy(a, b, c)
    mutual = s_a + s_b - s_ab
    qd = s_b - s_ab + s_cond
    classical = s_a - s_cond
    return [
        DiscordResult(float(qd[k]), float(classical[k]), float(mutual[k]), (float(polar[k]), float(az[k])))
        for k in range(rho.shape[0])
    ]


def discord(state: XState) -> DiscordResult:
    return discord_batch([state])[0]


@dataclass(frozen=True)
class NonMarkovResult:
    measure: float
    growth_intervals: list[tuple[float, float]]
    trace_distance_series: np.ndarray = field(repr=False)
    increments: list[float] = field(default_factory=list)
    endpoint_values: list[tuple[float, float]] = field(default_factory=list, repr=False)

    def running(self, times) -> np.ndarray:
        """Growth accumulated up to each time in ``times``; ends at ``measure``."""
        y = self.trace_distance_series
        out = np.zeros(len(times))
        for (ta, tb), (ya, yb) in zip(self.growth_intervals, self.endpoint_values):
            t = np.asarray(times)
            inside = (t > ta) & (t < tb)
            out += np.where(t >= tb, yb - ya, 0.0)
            out += np.where(inside, np.clip(y - ya, 0.0, yb - ya), 0.0)
        return out


def trace_distance_series(
    excited: EvolutionRecord,
    ground: EvolutionRecord,
    check_points: int = 20,
    tol: float = 1e-8,
) -> np.ndarray:
    """Trace distance between the atom states evolved from |e> and |g>.

    Returns ``|b(t)|^2`` and verifies it against the explicit trace-norm
    distance of the reduced atom states at ``check_points`` grid points.
    """
    if excited.times.shape != ground.times.shape or np.any(excited.times != ground.times):
        raise DimensionError("records are on different time grids")
    if excited.b_magnitude_sq is None:
        raise ValueError("first record must start with the atom excited")
    if excited.full_states is None or ground.full_states is None:
        raise ValueError("both records need full_states for the cross-check")
    series = np.array(excited.b_magnitude_sq, dtype=float)

    picks = np.unique(np.linspace(0, series.size - 1, min(check_points, series.size)).round().astype(int))
    for k in picks:
        ra = qmath.partial_trace(excited.full_states[k], excited.dims, 0)
        rb = qmath.partial_trace(ground.full_states[k], ground.dims, 0)
        direct = qmath.trace_norm_distance(ra, rb)
        if abs(direct - series[k]) > tol:
            raise ConsistencyError(
                f"trace distance {direct:.12g} disagrees with |b|^2 = {series[k]:.12g} at t = {excited.times[k]:g}"
            )
    return series


def _vertex(t, y, k):
    """Extremum of the parabola through samples ``k-1, k, k+1``."""
    t0, t1, t2 = t[k - 1], t[k], t[k + 1]
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    d01 = (y1 - y0) / (t1 - t0)
    d12 = (y2 - y1) / (t2 - t1)
    curv = (d12 - d01) / (t2 - t0)
    if curv == 0.0:
        return t1, y1
    # y(t) = y1 + slope (t - t1) + curv (t - t1)^2 with the centred slope below
    slope = d01 + curv * (t1 - t0)
    tv = t1 - slope / (2 * curv)
    if not t0 <= tv <= t2:
        return t1, y1
    return tv, y1 - slope**2 / (4 * curv)


def non_markovianity(series, times=None, refine: bool = True) -> NonMarkovResult:
    """BLP measure: total growth of the trace distance over all rising stretches.

    Rising stretches are maximal runs of positive discrete increments. With
    ``refine`` each interior endpoint (a sampled local extremum) is moved to
    the vertex of the three-point parabola through it, which makes the
    measure converge at third order in the sampling step instead of second.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("need at least two samples")
    t = np.arange(y.size, dtype=float) if times is None else np.asarray(times, dtype=float)
    if t.shape != y.shape:
        raise DimensionError("times and series differ in length")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")

    rising = np.diff(y) > 0
    intervals, increments, values = [], [], []
    k = 0
    n = rising.size
    while k < n:
        if not rising[k]:
            k += 1
            continue
        start = k
        while k < n and rising[k]:
            k += 1
        end = k  # sample index of the local maximum
        ta, ya = t[start], y[start]
        tb, yb = t[end], y[end]
        if refine:
            if 0 < start:
                ta, ya = _vertex(t, y, start)
            if end < y.size - 1:
                tb, yb = _vertex(t, y, end)
        intervals.append((float(ta), float(tb)))
        increments.append(float(yb - ya))
        values.append((float(ya), float(yb)))
    return NonMarkovResult(float(sum(increments)), intervals, y, increments, values)
