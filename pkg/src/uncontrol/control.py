"""Controllability criteria for dx/dt = Ax + bu and the coupling statistic Z.

The primitive quantity is z = min_i |<v_i, b>| over the unit eigenvectors of
A. The system is controllable iff no eigenvector is orthogonal to b, i.e.
z > 0; numerically the threshold is a caller parameter applied only at the
API edge. The Kalman rank test on [b, Ab, ..., A^(n-1)b] is an independent
criterion used to cross-check the eigenvector route.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sampling import InputVector, SymMatrix
from .symeig import EigenDecomposition

__all__ = [
    "RandomSystem",
    "CouplingStat",
    "coupling_stat",
    "is_controllable_eig",
    "kalman_rank",
    "default_zero_tol",
]

_ZERO_TOL_SCALE = 1e-8


@dataclass(frozen=True)
class RandomSystem:
    """State matrix and input vector of one sampled system."""

    a: SymMatrix
    b: InputVector

    def __post_init__(self) -> None:
        if self.a.n != self.b.n:
            raise ValueError(f"dimension mismatch: A is {self.a.n}, b is {self.b.n}")


@dataclass(frozen=True)
class CouplingStat:
    """z = min_i |<v_i, b>| and the index attaining it (lowest on ties)."""

    z: float
    argmin_index: int


def coupling_stat(decomp: EigenDecomposition, b: InputVector) -> CouplingStat:
    """Minimum absolute coupling between the eigenvectors and b."""
    if decomp.n != b.n:
        raise ValueError(f"dimension mismatch: decomposition is {decomp.n}, b is {b.n}")
    prods = np.abs(decomp.eigenvectors.T @ b.components)
    idx = int(np.argmin(prods))
    return CouplingStat(z=float(prods[idx]), argmin_index=idx)


def default_zero_tol(b: InputVector) -> float:
    """Default orthogonality threshold, 1e-8 * |b|_2."""
    return _ZERO_TOL_SCALE * b.norm()


def is_controllable_eig(
    decomp: EigenDecomposition, b: InputVector, zero_tol: float | None = None
) -> bool:
    """True iff every eigenvector couples to b: z > zero_tol.

    `zero_tol` defaults to 1e-8 * |b|_2. A zero b is never controllable.
    """
    if zero_tol is None:
        zero_tol = default_zero_tol(b)
    if zero_tol < 0:
        raise ValueError(f"zero_tol must be >= 0, got {zero_tol}")
    return coupling_stat(decomp, b).z > zero_tol


def _qr_pivot_magnitudes(k: np.ndarray) -> np.ndarray:
    # Householder QR with column pivoting; returns |R_jj| in pivot order.
    r = k.astype(np.float64).copy()
    n = r.shape[0]
    mags = np.zeros(n)
    for j in range(n):
        norms = np.sqrt(np.sum(r[j:, j:] ** 2, axis=0))
        p = j + int(np.argmax(norms))
        r[:, [j, p]] = r[:, [p, j]]
        x = r[j:, j]
        nx = float(np.linalg.norm(x))
        mags[j] = nx
        if nx == 0.0:
            break
        v = x.copy()
        v[0] += nx if x[0] >= 0 else -nx
        vn = float(np.linalg.norm(v))
        if vn == 0.0:
            continue
        v /= vn
        r[j:, j:] -= 2.0 * np.outer(v, v @ r[j:, j:])
    return mags


def kalman_rank(a: SymMatrix, b: InputVector, rank_tol: float = 1e-8) -> int:
    """Numerical rank of the controllability matrix [b, Ab, ..., A^(n-1)b].

    Powers are accumulated by repeated matrix-vector products. Columns are
    scaled to unit norm first, so the pivot threshold is insensitive to the
    geometric growth of |A^k b|; the rank is the number of QR column-pivot
    magnitudes above rank_tol times the largest pivot.
    """
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: A is {a.n}, b is {b.n}")
    if rank_tol <= 0:
        raise ValueError(f"rank_tol must be > 0, got {rank_tol}")
    n = a.n
    dense = a.to_dense()
    k = np.empty((n, n), dtype=np.float64)
    col = b.components.copy()
    for j in range(n):
        k[:, j] = col
        col = dense @ col
    norms = np.sqrt(np.sum(k * k, axis=0))
    nonzero = norms > 0.0
    k[:, nonzero] /= norms[nonzero]
    if not nonzero.any():
        return 0
    mags = _qr_pivot_magnitudes(k)
    if mags[0] == 0.0:
        return 0
    return int(np.sum(mags > rank_tol * mags[0]))
