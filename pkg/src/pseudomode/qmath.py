"""Dense complex linear algebra on small Hilbert spaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every space
handled by this package has dimension at most 64, so nothing here is sparse.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DimensionError, NegativeEigenvalueError, NotHermitianError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
CLAMP_TOL = 1e-10

# Basis convention: index 0 is the ground state |g>, index 1 the excited |e>.
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def destroy(n_levels: int) -> np.ndarray:
    """Bosonic lowering operator truncated to ``n_levels`` Fock states."""
    return np.diag(np.sqrt(np.arange(1, n_levels)), k=1).astype(complex)


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def kron(*ops: np.ndarray) -> np.ndarray:
    """Tensor product of any number of matrices, left to right."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(op, dtype=complex) for op in ops))


def embed(op: np.ndarray, dims: Sequence[int], site: int) -> np.ndarray:
    """Place a single-subsystem operator at ``site`` of a composite space."""
    if op.shape != (dims[site], dims[site]):
        raise DimensionError(
            f"operator of shape {op.shape} does not fit subsystem {site} of dims {list(dims)}"
        )
    return kron(*(op if k == site else np.eye(d) for k, d in enumerate(dims)))


def _as_square(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {rho.shape}")
    return rho


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int] | int) -> np.ndarray:
    """Reduce ``rho`` onto the subsystems listed in ``keep``.

    Parameters
    ----------
    rho : ndarray
        Square operator on the composite space ``prod(dims)``.
    dims : sequence of int
        Subsystem dimensions, in tensor-product order.
    keep : int or sequence of int
        Subsystems that survive. Their relative order is preserved.
    """
    rho = _as_square(rho)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != rho.shape[0]:
        raise DimensionError(f"dims {dims} do not multiply to {rho.shape[0]}")
    keep = [keep] if isinstance(keep, (int, np.integer)) else sorted(int(k) for k in keep)
    if any(k < 0 or k >= len(dims) for k in keep) or len(set(keep)) != len(keep):
        raise DimensionError(f"invalid subsystem selection {keep} for {len(dims)} subsystems")

    n = len(dims)
    traced = [k for k in range(n) if k not in keep]
    t = rho.reshape(dims + dims)
    # contract each traced subsystem's row index with its column index
    for offset, k in enumerate(traced):
        axis = k - offset
        t = np.trace(t, axis1=axis, axis2=axis + t.ndim // 2)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.shape[-1] == m.shape[-2] and bool(np.max(np.abs(m - dag(m)), initial=0.0) <= tol)


def hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal basis of n x n Hermitian matrices, one flattened matrix per column.

    ``T @ x`` is row-major vec(rho) for real coordinates ``x``, and the
    ``(j, k)`` and ``(k, j)`` entries come out exact conjugates of each other.
    """
    t = np.zeros((n * n, n * n), dtype=complex)
    col = 0
    r = 1 / np.sqrt(2)
    for j in range(n):
        t[j * n + j, col] = 1.0
        col += 1
        for k in range(j + 1, n):
            t[j * n + k, col] = t[k * n + j, col] = r
            t[j * n + k, col + 1] = 1j * r
            t[k * n + j, col + 1] = -1j * r
            col += 2
    return t


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigenvalues sorted descending with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dag(v)


def hermitian_eig(m: np.ndarray, tol: float = HERMITIAN_TOL) -> HermitianSpectrum:
    m = _as_square(m)
    if not is_hermitian(m, tol):
        raise NotHermitianError(
            f"matrix deviates from Hermitian by {np.max(np.abs(m - dag(m))):.3e} (tol {tol:g})"
        )
    w, v = np.linalg.eigh(0.5 * (m + dag(m)))
    order = np.argsort(w)[::-1]
    return HermitianSpectrum(w[order], v[:, order])


def clamp_eigenvalues(w: np.ndarray, tol: float = CLAMP_TOL) -> np.ndarray:
    """Zero eigenvalues in ``[-tol, 0)``; anything more negative is an error."""
    w = np.asarray(w, dtype=float)
    low = np.min(w, initial=0.0)
    if low < -tol:
        raise NegativeEigenvalueError(f"eigenvalue {low:.3e} below -{tol:g}")
    return np.where(w < 0.0, 0.0, w)


def entropy_bits(p: np.ndarray, axis: int = -1) -> np.ndarray:
    """Shannon entropy in bits of non-negative weights, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    safe = np.where(p > 0.0, p, 1.0)
    return -np.sum(np.where(p > 0.0, p * np.log2(safe), 0.0), axis=axis)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy ``-tr(rho log2 rho)`` of a density matrix, in bits."""
    rho = _as_square(rho)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace {tr!r} is not 1 within {TRACE_TOL:g}")
    w = clamp_eigenvalues(hermitian_eig(rho).eigenvalues)
    return float(entropy_bits(w))


def trace_norm_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Trace distance ``||a - b||_1 / 2`` between two Hermitian operators."""
    a, b = _as_square(a), _as_square(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    w = hermitian_eig(a - b).eigenvalues
    return 0.5 * float(np.sum(np.abs(w)))
