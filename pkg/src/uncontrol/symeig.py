"""Eigendecomposition of real symmetric matrices with a fixed sign convention.

Eigenvalues are returned in ascending order and every eigenvector column is
normalized so that its first component of magnitude > 1e-12 is positive,
which picks one representative from {v, -v} deterministically. Each result
is validated against orthonormality and residual tolerances before it is
returned; a decomposition that cannot meet them raises
EigenConvergenceError rather than silently degrading downstream statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import Tolerance
from .sampling import SymMatrix

__all__ = [
    "EigenDecomposition",
    "EigenConvergenceError",
    "eig_symmetric",
    "sign_normalize",
]

_SIGN_TOL = 1e-12
_DEFAULT_CHECK_TOL = 1e-9


class EigenConvergenceError(RuntimeError):
    """The eigensolver failed to produce a decomposition within tolerance."""


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues and orthonormal, sign-normalized eigenvectors.

    Column i of `eigenvectors` is the unit eigenvector for `eigenvalues[i]`.
    """

    n: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def sign_normalize(v: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so the first component with |x| > 1e-12 is positive.

    Idempotent; columns with no component above the threshold (impossible for
    unit vectors) are left unchanged. Returns a new array.
    """
    v = np.array(v, dtype=np.float64, copy=True)
    mask = np.abs(v) > _SIGN_TOL
    any_col = mask.any(axis=0)
    first = mask.argmax(axis=0)
    lead = v[first, np.arange(v.shape[1])]
    flip = any_col & (lead < 0.0)
    v[:, flip] *= -1.0
    return v


def _validate(dense: np.ndarray, w: np.ndarray, v: np.ndarray, check_tol: float) -> None:
    n = dense.shape[0]
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
        raise EigenConvergenceError("eigensolver produced non-finite output")
    if np.any(np.diff(w) < 0):
        raise EigenConvergenceError("eigenvalues are not in ascending order")
    gram = v.T @ v - np.eye(n)
    if np.max(np.abs(gram)) > check_tol:
        raise EigenConvergenceError(
            f"eigenvector columns not orthonormal within {check_tol:g}"
        )
    fro = np.sqrt(np.sum(dense * dense))
    resid = dense @ v - v * w
    if np.max(np.sqrt(np.sum(resid * resid, axis=0))) > check_tol * (1.0 + fro):
        raise EigenConvergenceError(f"eigen residual exceeds {check_tol:g}*(1+|A|_F)")


def eig_symmetric(a: SymMatrix, tol: Tolerance | None = None) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix satisfying all invariants.

    Deterministic for fixed input. The result has ascending eigenvalues,
    orthonormal columns within 1e-9 entrywise, residual |A v - lambda v|
    within 1e-9*(1+|A|_F), and the sign convention applied. `tol.abs_tol`,
    when given, overrides the 1e-9 validation threshold.
    """
    check_tol = _DEFAULT_CHECK_TOL if tol is None else max(tol.abs_tol, 1e-15)
    dense = a.to_dense()
    try:
        w, v = np.linalg.eigh(dense)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"eigensolver did not converge: {exc}") from exc
    v = sign_normalize(v)
    _validate(dense, w, v, check_tol)
    return EigenDecomposition(n=a.n, eigenvalues=w, eigenvectors=v)


def _eigh_batch(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched eigh with sign normalization; mats has shape (B, n, n).

    Returns (eigenvalues (B, n) ascending, eigenvectors (B, n, n)). Raises
    EigenConvergenceError if the solver fails for any matrix in the batch;
    the caller decides how to isolate and retry individual trials.
    """
    try:
        w, v = np.linalg.eigh(mats)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"batched eigensolver failure: {exc}") from exc
    b, n, _ = v.shape
    mask = np.abs(v) > _SIGN_TOL
    first = mask.argmax(axis=1)  # (B, n) first above-threshold row per column
    lead = np.take_along_axis(v, first[:, None, :], axis=1)[:, 0, :]
    flip = mask.any(axis=1) & (lead < 0.0)
    v *= np.where(flip, -1.0, 1.0)[:, None, :]
    return w, v


def _batch_residual_ok(mats: np.ndarray, w: np.ndarray, v: np.ndarray, check_tol: float = _DEFAULT_CHECK_TOL) -> np.ndarray:
    """Boolean mask (B,) of trials whose decomposition passes the residual check."""
    finite = np.isfinite(w).all(axis=1) & np.isfinite(v).all(axis=(1, 2))
    resid = mats @ v - v * w[:, None, :]
    col_norms = np.sqrt(np.sum(resid * resid, axis=1))
    fro = np.sqrt(np.sum(mats * mats, axis=(1, 2)))
    return finite & (col_norms.max(axis=1) <= check_tol * (1.0 + fro))
