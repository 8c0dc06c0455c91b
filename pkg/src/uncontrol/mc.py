"""Monte Carlo estimators for P_eps, P_{eps,b}, and spherical cap measures.

Per-trial randomness is derived from (seed, trial_index) substreams, so the
estimate is a pure function of (seed, trials) no matter how trials are
distributed over workers or batches. Trials are processed in fixed chunks of
4096 at absolute trial offsets; workers receive whole chunks, which keeps
every floating-point operation identical across worker counts.

Confidence intervals are Wilson score intervals, which behave sanely when
p_hat sits at 0 or 1; std_err is the plain binomial formula.

A trial whose eigendecomposition fails validation (not expected on GOE
input) is retried with a dedicated resample substream and counted; more than
0.01% resampled trials aborts the run rather than risk a biased estimate.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .control import coupling_stat
from .numerics import DEFAULT_TOL, Tolerance
from .sampling import (
    STREAM_B,
    STREAM_GOE,
    STREAM_RESAMPLE,
    STREAM_SPHERE,
    InputVector,
    RngState,
    _diag_packed_indices,
    _normals_for_streams,
    sample_goe,
    substream_id,
)
from .symeig import EigenConvergenceError, _batch_residual_ok, _eigh_batch, eig_symmetric
from .theory import (
    p_eps_b_bound,
    p_eps_bound_integral,
    p_eps_bound_poly,
    p_eps_exact_n2,
)

__all__ = [
    "Estimate",
    "SweepRow",
    "ResampleBudgetError",
    "estimate_p_eps",
    "estimate_p_eps_b",
    "estimate_cap_measure",
    "sweep",
]

_CHUNK = 4096
_WILSON_Z = 1.96
_RESAMPLE_FRACTION = 1e-4
_MAX_RESAMPLE_ATTEMPTS = 64
_SQRT2 = math.sqrt(2.0)


class ResampleBudgetError(RuntimeError):
    """Raised when more than 0.01% of trials needed eigensolver resampling."""


@dataclass(frozen=True)
class Estimate:
    """Binomial Monte Carlo estimate with Wilson 95% confidence interval."""

    p_hat: float
    trials: int
    std_err: float
    ci95_lo: float
    ci95_hi: float
    seed: int
    successes: int
    resampled: int = 0

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.successes <= self.trials:
            raise ValueError("successes must lie in [0, trials]")
        if self.p_hat != self.successes / self.trials:
            raise ValueError("p_hat must equal successes/trials")
        expected_se = math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.trials)
        if self.std_err != expected_se:
            raise ValueError("std_err must equal sqrt(p_hat(1-p_hat)/trials)")
        if not self.ci95_lo <= self.p_hat <= self.ci95_hi:
            raise ValueError("confidence interval must contain p_hat")


def _wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    z = _WILSON_Z
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    # the endpoints are exactly 0 and 1 at the boundary counts; rounding in
    # center +- half can land a hair inside and exclude p_hat
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def _make_estimate(successes: int, trials: int, seed: int, resampled: int) -> Estimate:
    p = successes / trials
    lo, hi = _wilson_interval(successes, trials)
    return Estimate(
        p_hat=p,
        trials=trials,
        std_err=math.sqrt(p * (1.0 - p) / trials),
        ci95_lo=lo,
        ci95_hi=hi,
        seed=seed,
        successes=successes,
        resampled=resampled,
    )


def _domain_keys(domain: int, lo: int, hi: int) -> np.ndarray:
    trial_ids = np.arange(lo, hi, dtype=np.uint64)
    return np.uint64(domain << 56) | trial_ids


def _goe_batch(seed: int, n: int, lo: int, hi: int, domain: int = STREAM_GOE) -> np.ndarray:
    """Dense GOE(n) draws for trials [lo, hi); bitwise equal to sample_goe per trial."""
    m = n * (n + 1) // 2
    normals = _normals_for_streams(seed, _domain_keys(domain, lo, hi), m)
    normals[:, _diag_packed_indices(n)] *= _SQRT2
    batch = hi - lo
    mats = np.empty((batch, n, n), dtype=np.float64)
    iu = np.triu_indices(n)
    mats[:, iu[0], iu[1]] = normals
    mats[:, iu[1], iu[0]] = normals
    return mats


def _resample_z(seed: int, n: int, trial: int, b_comp: np.ndarray) -> float:
    # Fresh substream for a failed trial; retries are sequential draws from it.
    state = RngState(seed=seed, stream_id=substream_id(STREAM_RESAMPLE, trial))
    for _ in range(_MAX_RESAMPLE_ATTEMPTS):
        mat = sample_goe(state, n)
        try:
            decomp = eig_symmetric(mat)
        except EigenConvergenceError:
            continue
        return coupling_stat(decomp, InputVector(n=n, components=b_comp)).z
    raise EigenConvergenceError(
        f"trial {trial}: eigensolver failed {_MAX_RESAMPLE_ATTEMPTS} resample attempts"
    )


def _z_chunk(seed: int, n: int, lo: int, hi: int, b_fixed: np.ndarray | None) -> tuple[np.ndarray, int]:
    """Coupling statistic z for trials [lo, hi); returns (z values, resampled count)."""
    mats = _goe_batch(seed, n, lo, hi)
    if b_fixed is None:
        b_comp = _normals_for_streams(seed, _domain_keys(STREAM_B, lo, hi), n)
    else:
        b_comp = np.broadcast_to(b_fixed, (hi - lo, n))
    resampled = 0
    try:
        w, v = _eigh_batch(mats)
        ok = _batch_residual_ok(mats, w, v)
    except EigenConvergenceError:
        # Isolate the failing matrices; solver success is per-matrix, so this
        # stays independent of how trials are grouped into chunks.
        w = np.zeros((hi - lo, n))
        v = np.zeros((hi - lo, n, n))
        ok = np.zeros(hi - lo, dtype=bool)
        for i in range(hi - lo):
            try:
                wi, vi = _eigh_batch(mats[i : i + 1])
            except EigenConvergenceError:
                continue
            w[i], v[i] = wi[0], vi[0]
            ok[i] = _batch_residual_ok(mats[i : i + 1], wi, vi)[0]
    prods = np.abs(np.matmul(v.transpose(0, 2, 1), b_comp[:, :, None]))[:, :, 0]
    z = prods.min(axis=1)
    if not ok.all():
        for i in np.nonzero(~ok)[0]:
            z[i] = _resample_z(seed, n, lo + int(i), b_comp[i])
            resampled += 1
    return z, resampled


def _z_worker(payload) -> tuple[np.ndarray, int]:
    seed, n, lo, hi, b_fixed = payload
    return _z_chunk(seed, n, lo, hi, b_fixed)


def _cap_chunk(seed: int, n: int, lo: int, hi: int, height: float) -> tuple[int, int]:
    """Cap-membership successes for trials [lo, hi) of the sphere domain."""
    normals = _normals_for_streams(seed, _domain_keys(STREAM_SPHERE, lo, hi), n)
    norms = np.sqrt(np.sum(normals * normals, axis=1))
    resampled = 0
    for i in np.nonzero(norms == 0.0)[0]:  # measure-zero; resampled for completeness
        state = RngState(seed=seed, stream_id=substream_id(STREAM_RESAMPLE, lo + int(i)))
        while True:
            fresh = np.array([state.normal() for _ in range(n)])
            if np.linalg.norm(fresh) > 0.0:
                normals[i] = fresh
                norms[i] = np.linalg.norm(fresh)
                break
        resampled += 1
    theta1 = normals[:, 0] / norms
    return int(np.sum(theta1 >= height)), resampled


def _cap_worker(payload) -> tuple[int, int]:
    seed, n, lo, hi, height = payload
    return _cap_chunk(seed, n, lo, hi, height)


def _chunk_bounds(trials: int) -> list[tuple[int, int]]:
    return [(s, min(s + _CHUNK, trials)) for s in range(0, trials, _CHUNK)]


def _run_chunked(worker, payloads, workers: int) -> list:
    if workers <= 1 or len(payloads) <= 1:
        return [worker(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=min(workers, len(payloads))) as pool:
        return list(pool.map(worker, payloads))


def _default_workers() -> int:
    return os.cpu_count() or 1


def _check_resample_budget(resampled: int, trials: int) -> None:
    if resampled > _RESAMPLE_FRACTION * trials:
        raise ResampleBudgetError(
            f"{resampled} of {trials} trials required eigensolver resampling "
            f"(limit {_RESAMPLE_FRACTION:.2%}); aborting to avoid bias"
        )


def _validate_common(n: int, eps: float, trials: int, seed: int) -> None:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if trials < 100:
        raise ValueError(f"trials must be >= 100, got {trials}")
    if not 0 <= seed < (1 << 64):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")


def _z_values(seed: int, n: int, trials: int, b_fixed: np.ndarray | None, workers: int) -> tuple[np.ndarray, int]:
    payloads = [(seed, n, lo, hi, b_fixed) for lo, hi in _chunk_bounds(trials)]
    results = _run_chunked(_z_worker, payloads, workers)
    z = np.concatenate([r[0] for r in results])
    resampled = sum(r[1] for r in results)
    _check_resample_budget(resampled, trials)
    return z, resampled


def estimate_p_eps(
    n: int, eps: float, trials: int, seed: int, workers: int | None = None
) -> Estimate:
    """Estimate P_eps: fraction of (A, b) draws with min_i |<v_i, b>| < eps.

    A ~ GOE(n) and b ~ N(0, I_n) are drawn from independent substreams per
    trial. The result depends only on (n, eps, trials, seed), not on workers.
    """
    _validate_common(n, eps, trials, seed)
    workers = _default_workers() if workers is None else workers
    z, resampled = _z_values(seed, n, trials, None, workers)
    return _make_estimate(int(np.sum(z < eps)), trials, seed, resampled)


def estimate_p_eps_b(
    n: int, eps: float, b: InputVector, trials: int, seed: int, workers: int | None = None
) -> Estimate:
    """Estimate P_{eps,b} with b held fixed and only A ~ GOE(n) resampled."""
    _validate_common(n, eps, trials, seed)
    if b.n != n:
        raise ValueError(f"b has dimension {b.n}, expected {n}")
    if b.norm() == 0.0:
        raise ValueError("b must be nonzero")
    workers = _default_workers() if workers is None else workers
    z, resampled = _z_values(seed, n, trials, b.components, workers)
    return _make_estimate(int(np.sum(z < eps)), trials, seed, resampled)


def estimate_cap_measure(n: int, height: float, trials: int, seed: int) -> Estimate:
    """Estimate the normalized cap measure: P(theta_1 >= height), theta uniform on S^(n-1)."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 <= height <= 1.0:
        raise ValueError(f"height must be in [0, 1], got {height}")
    if trials < 100:
        raise ValueError(f"trials must be >= 100, got {trials}")
    if not 0 <= seed < (1 << 64):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    payloads = [(seed, n, lo, hi, height) for lo, hi in _chunk_bounds(trials)]
    results = [_cap_worker(p) for p in payloads]
    successes = sum(r[0] for r in results)
    resampled = sum(r[1] for r in results)
    return _make_estimate(successes, trials, seed, resampled)


@dataclass(frozen=True)
class SweepRow:
    """One (n, eps) grid point: estimate (when run), bounds, and n=2 exact value.

    Bound columns hold clamped values; the raw_* fields keep the unclamped
    formula values. The per-b union bound is evaluated at b_norm = sqrt(n),
    the root-mean-square norm of the input ensemble. Estimate fields are None
    when the sweep was run with trials = 0; exact_n2 is None unless n = 2.
    """

    n: int
    epsilon: float
    estimate: float | None
    std_err: float | None
    ci_lo: float | None
    ci_hi: float | None
    bound_poly: float
    bound_integral: float
    bound_per_b: float
    exact_n2: float | None
    trials: int
    raw_bound_poly: float
    raw_bound_integral: float
    raw_bound_per_b: float
    raw_exact_n2: float | None


def sweep(
    n_list,
    eps_grid,
    trials: int,
    seed: int,
    workers: int | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> list[SweepRow]:
    """Evaluate bounds, exact values, and optional estimates on an (n, eps) grid.

    One row per (n, eps) pair, n-major. With trials > 0 the per-n coupling
    statistics are sampled once and shared by every eps on the grid, so each
    row's estimate equals estimate_p_eps(n, eps, trials, seed) exactly while
    costing a single pass.
    """
    n_list = list(n_list)
    eps_grid = [float(e) for e in eps_grid]
    if not n_list or not eps_grid:
        raise ValueError("n_list and eps_grid must be nonempty")
    for n in n_list:
        if n < 2:
            raise ValueError(f"n must be >= 2, got {n}")
    for eps in eps_grid:
        if eps < 0:
            raise ValueError(f"eps must be >= 0, got {eps}")
    if trials < 0:
        raise ValueError(f"trials must be >= 0, got {trials}")
    if trials > 0 and trials < 100:
        raise ValueError(f"trials must be 0 or >= 100, got {trials}")
    workers = _default_workers() if workers is None else workers

    rows: list[SweepRow] = []
    for n in n_list:
        z = None
        resampled = 0
        if trials > 0:
            z, resampled = _z_values(seed, n, trials, None, workers)
        b_norm = math.sqrt(n)
        for eps in eps_grid:
            poly = p_eps_bound_poly(eps, n)
            integral = p_eps_bound_integral(eps, n, tol)
            per_b = p_eps_b_bound(eps, b_norm, n)
            exact = p_eps_exact_n2(eps, tol) if n == 2 else None
            est = std = lo = hi = None
            if z is not None:
                e = _make_estimate(int(np.sum(z < eps)), trials, seed, resampled)
                est, std, lo, hi = e.p_hat, e.std_err, e.ci95_lo, e.ci95_hi
            rows.append(
                SweepRow(
                    n=n,
                    epsilon=eps,
                    estimate=est,
                    std_err=std,
                    ci_lo=lo,
                    ci_hi=hi,
                    bound_poly=poly.clamped,
                    bound_integral=integral.clamped,
                    bound_per_b=per_b.clamped,
                    exact_n2=None if exact is None else exact.clamped,
                    trials=trials,
                    raw_bound_poly=poly.raw,
                    raw_bound_integral=integral.raw,
                    raw_bound_per_b=per_b.raw,
                    raw_exact_n2=None if exact is None else exact.raw,
                )
            )
    return rows
