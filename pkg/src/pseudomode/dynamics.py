"""Atom + pseudomode Lindblad dynamics.

The Hamiltonian is written in the frame rotating at the atomic frequency, so
only the detuning ``delta = omega_c - omega_0`` appears on the mode terms::

    H = sum_k (delta + f_k) a_k^+ a_k + sum_k (g_k s+ a_k + h.c.) + V (a_1^+ a_2 + a_1 a_2^+)

and every mode with a non-zero rate ``r_k`` carries the dissipator
``(r_k / 2) (2 a rho a^+ - a^+ a rho - rho a^+ a)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from . import qmath
from .errors import DimensionError, IntegrationError
from .spectral import PseudomodeNetwork

log = logging.getLogger(__name__)

MAX_FOCK = 4
DEFAULT_TOL = 1e-10
TRACE_DRIFT_LIMIT = 1e-7
LEAK_LIMIT = 1e-10

WEAK_GRID = (0.0, 10.0, 1000)
STRONG_GRID = (0.0, 30.0, 3000)


@dataclass(frozen=True, eq=False)
class LindbladSystem:
    hamiltonian: np.ndarray
    collapse_ops: tuple[tuple[np.ndarray, float], ...]
    dims: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @cached_property
    def excitation_number(self) -> np.ndarray:
        """Diagonal of ``s+ s- + sum_k a_k^+ a_k`` in the product basis."""
        grids = np.meshgrid(*(np.arange(d) for d in self.dims), indexing="ij")
        return sum(g.ravel() for g in grids).astype(float)

    @cached_property
    def liouvillian(self) -> np.ndarray:
        """Superoperator acting on the row-major flattening of rho."""
        h = self.hamiltonian
        eye = np.eye(self.dim)
        # row-major vec: vec(A X B) = kron(A, B^T) vec(X)
        sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
        for a, rate in self.collapse_ops:
            n = qmath.dag(a) @ a
            sup += rate * (np.kron(a, a.conj()) - 0.5 * np.kron(n, eye) - 0.5 * np.kron(eye, n.T))
        return sup

    @cached_property
    def real_generator(self) -> tuple[np.ndarray, np.ndarray]:
        """Basis ``T`` of Hermitian matrices and the real generator ``T^H L T``.

        Evolving real coordinates keeps rho Hermitian exactly; the complex
        vectorisation lets rounding seed an anti-Hermitian part that the
        stiffer networks then carry along.
        """
        t = qmath.hermitian_basis(self.dim)
        gen = t.conj().T @ self.liouvillian @ t
        return t, np.ascontiguousarray(gen.real)

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        """``d rho / dt`` evaluated directly, without the superoperator."""
        out = -1j * (self.hamiltonian @ rho - rho @ self.hamiltonian)
        for a, rate in self.collapse_ops:
            ad = qmath.dag(a)
            n = ad @ a
            out += rate * (a @ rho @ ad - 0.5 * (n @ rho + rho @ n))
        return out

    def basis_index(self, atom: int, modes=None) -> int:
        """Flat index of ``|atom, n_1, n_2, ...>``; modes default to vacuum."""
        occ = [atom] + list(modes if modes is not None else [0] * (len(self.dims) - 1))
        return int(np.ravel_multi_index(occ, self.dims))


def build_system(network: PseudomodeNetwork, detuning: float = 0.0, fock_cutoff: int = 1) -> LindbladSystem:
    if not 1 <= fock_cutoff <= MAX_FOCK:
        raise ValueError(f"fock_cutoff must be in [1, {MAX_FOCK}], got {fock_cutoff}")
    levels = fock_cutoff + 1
    dims = (2,) + (levels,) * network.mode_count
    sp = qmath.embed(qmath.SIGMA_PLUS, dims, 0)
    modes = [qmath.embed(qmath.destroy(levels), dims, k + 1) for k in range(network.mode_count)]

    h = np.zeros((sp.shape[0],) * 2, dtype=complex)
    for a, f, g in zip(modes, network.mode_freqs, network.atom_couplings):
        ad = qmath.dag(a)
        h += (detuning + f) * (ad @ a)
        h += g * (sp @ a) + np.conj(g) * (qmath.dag(sp) @ ad)
    if network.mode_count == 2 and network.intermode_coupling:
        a1, a2 = modes
        v = network.intermode_coupling
        h += v * (qmath.dag(a1) @ a2 + a1 @ qmath.dag(a2))

    collapse = tuple((a, float(r)) for a, r in zip(modes, network.decay_rates) if r > 0.0)
    return LindbladSystem(h, collapse, dims)


def initial_state(system: LindbladSystem, atom="e") -> np.ndarray:
    """Atom state ``atom`` times the pseudomode vacuum.

    ``atom`` is ``"e"``, ``"g"``, a 2-vector (ket) or a 2x2 density matrix.
    """
    if isinstance(atom, str):
        ket = {"g": [1, 0], "e": [0, 1]}[atom]
        atom = np.array(ket, dtype=complex)
    atom = np.asarray(atom, dtype=complex)
    if atom.shape == (2,):
        atom = np.outer(atom, atom.conj()) / np.vdot(atom, atom).real
    if atom.shape != (2, 2):
        raise DimensionError(f"atom state must be a 2-ket or 2x2 matrix, got shape {atom.shape}")
    vac = np.zeros((system.dim // 2,) * 2, dtype=complex)
    vac[0, 0] = 1.0
    return np.kron(atom, vac)


@dataclass
class EvolutionRecord:
    """Observables on the requested time grid.

    ``b_magnitude_sq`` is the excited-vacuum population normalised by its
    initial value, ``|b(t)|^2``. ``b_amplitude`` is the complex survival
    amplitude, read off the coherence between ``|e, vac>`` and ``|g, vac>``;
    it is only available when the initial state carries that coherence.
    """

    times: np.ndarray
    b_magnitude_sq: np.ndarray | None
    b_amplitude: np.ndarray | None
    atom_excited_pop: np.ndarray
    total_excitation: np.ndarray
    trace: np.ndarray
    leaked_population: np.ndarray
    full_states: np.ndarray | None = field(default=None, repr=False)
    dims: tuple[int, ...] = ()

    def atom_states(self) -> np.ndarray:
        if self.full_states is None:
            raise ValueError("record was produced without store_states=True")
        return np.array([qmath.partial_trace(r, self.dims, 0) for r in self.full_states])


def _check_initial(system: LindbladSystem, rho0: np.ndarray):
    if rho0.shape != (system.dim, system.dim):
        raise DimensionError(f"initial state shape {rho0.shape} does not match system dim {system.dim}")
    w = qmath.hermitian_eig(rho0).eigenvalues
    qmath.clamp_eigenvalues(w)
    if abs(np.trace(rho0).real - 1.0) > qmath.TRACE_TOL:
        raise ValueError("initial state is not unit trace")


def evolve(
    system: LindbladSystem,
    initial: np.ndarray,
    t_grid,
    tol: float = DEFAULT_TOL,
    store_states: bool = False,
) -> EvolutionRecord:
    """Integrate the master equation and sample observables on ``t_grid``.

    Uses the Dormand-Prince 5(4) pair with its quartic dense output, with
    ``tol`` as both the absolute and the relative local error target.
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size < 1 or np.any(np.diff(times) <= 0):
        raise ValueError("t_grid must be a strictly increasing 1-d sequence")
    rho0 = np.asarray(initial, dtype=complex)
    _check_initial(system, rho0)

    dim = system.dim
    basis, gen = system.real_generator
    x0 = (basis.conj().T @ rho0.ravel()).real
    if times.size == 1 or times[-1] == times[0]:
        xs = x0.reshape(1, -1)
    else:
        sol = solve_ivp(
            lambda t, x: gen @ x,
            (times[0], times[-1]),
            x0,
            method="RK45",
            t_eval=times,
            rtol=tol,
            atol=tol,
        )
        if sol.status != 0:
            raise IntegrationError(f"integration failed: {sol.message}")
        xs = sol.y.T
        log.debug("RK45 took %d right-hand-side evaluations", sol.nfev)
    states = (xs @ basis.T).reshape(-1, dim, dim)

    diag = np.einsum("tii->ti", states).real
    trace = diag.sum(axis=1)
    drift = np.max(np.abs(trace - 1.0))
    if drift > TRACE_DRIFT_LIMIT:
        raise IntegrationError(f"trace drifted by {drift:.3e}; the integrator tolerance is too loose for this system")

    nexc = system.excitation_number
    initial_top = nexc[np.abs(np.diag(rho0)) > 0].max()
    leaked = diag[:, nexc > initial_top].sum(axis=1)
    if leaked.size and np.max(np.abs(leaked)) > LEAK_LIMIT:
        raise IntegrationError(f"population {np.max(np.abs(leaked)):.3e} left the initial excitation sectors")

    e0 = system.basis_index(1)
    g0 = system.basis_index(0)
    p_e0 = rho0[e0, e0].real
    coh0 = rho0[e0, g0]
    b_sq = diag[:, e0] / p_e0 if p_e0 > 0 else None
    b_amp = states[:, e0, g0] / coh0 if abs(coh0) > 1e-12 else None

    atom_excited = diag[:, nexc.size // 2:].sum(axis=1)
    return EvolutionRecord(
        times=times,
        b_magnitude_sq=b_sq,
        b_amplitude=b_amp,
        atom_excited_pop=atom_excited,
        total_excitation=diag @ nexc,
        trace=trace,
        leaked_population=leaked,
        full_states=states if store_states else None,
        dims=system.dims,
    )


def excited_amplitude(network: PseudomodeNetwork, detuning: float, t_grid, tol=DEFAULT_TOL, fock_cutoff=1):
    """Complex ``b(t)`` from the full master equation.

    Evolves ``(|g> + |e>)/sqrt(2)`` with the pseudomodes in vacuum, so that
    ``b`` is read linearly from a coherence rather than from the square root
    of a population.
    """
    system = build_system(network, detuning, fock_cutoff)
    rho0 = initial_state(system, np.array([1.0, 1.0]) / np.sqrt(2))
    return evolve(system, rho0, t_grid, tol).b_amplitude


def single_excitation_generator(network: PseudomodeNetwork, detuning: float = 0.0) -> np.ndarray:
    """Effective non-Hermitian Hamiltonian on ``(c_atom, c_mode1, ...)``."""
    n = network.mode_count
    m = np.zeros((n + 1, n + 1), dtype=complex)
    for k in range(n):
        g = network.atom_couplings[k]
        m[0, k + 1] = g
        m[k + 1, 0] = np.conj(g)
        m[k + 1, k + 1] = detuning + network.mode_freqs[k] - 0.5j * network.decay_rates[k]
    if n == 2:
        m[1, 2] = m[2, 1] = network.intermode_coupling
    return m


def amplitude_ode_oracle(network: PseudomodeNetwork, detuning: float, t_grid) -> np.ndarray:
    """Atom amplitude ``c_atom(t)`` from the single-excitation linear ODE.

    Solved with the exact propagator ``expm(-i M t)`` at each grid point, so
    it shares nothing with the Runge-Kutta path in :func:`evolve`.
    """
    m = single_excitation_generator(network, detuning)
    c0 = np.zeros(m.shape[0], dtype=complex)
    c0[0] = 1.0
    return np.array([(expm(-1j * m * t) @ c0)[0] for t in np.asarray(t_grid, dtype=float)])


def default_grid(regime: str) -> np.ndarray:
    start, stop, n = {"weak": WEAK_GRID, "strong": STRONG_GRID}[regime]
    return np.linspace(start, stop, n)
