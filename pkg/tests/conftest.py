"""Shared oracle helpers for the test suite.

Reference values are computed along routes independent of the library code
under test: scipy special functions and quadrature, exact half-integer Gamma
recurrences, and closed forms evaluated by hand.
"""

from __future__ import annotations

import math

import numpy as np


def exact_gamma_half(k: int) -> float:
    """Gamma(k/2) for integer k >= 1 by recurrence from Gamma(1/2) and Gamma(1)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k % 2 == 0:
        # Gamma(m) = (m-1)!
        return float(math.factorial(k // 2 - 1))
    value = math.sqrt(math.pi)  # Gamma(1/2)
    x = 0.5
    while x < k / 2 - 0.25:
        value *= x
        x += 1.0
    return value


def poly_bound_reference(eps: float, n: int) -> float:
    """Alternating-sum polynomial bound via exact half-integer Gammas."""
    total = 0.0
    for k in range(1, n):
        term = (
            math.comb(n - 1, k)
            * n
            * exact_gamma_half(n - k)
            / (2 ** (k / 2) * exact_gamma_half(n))
            * eps**k
        )
        total += term if k % 2 == 1 else -term
    return total


def cap_measure_reference(n: int, height: float) -> float:
    """Normalized cap measure by direct quadrature of the theta_1 density.

    The first coordinate of a uniform point on S^(n-1) has density
    proportional to (1 - t^2)^((n-3)/2) on [-1, 1].
    """
    from scipy import integrate

    def dens(t):
        return (1.0 - t * t) ** ((n - 3) / 2)

    if n == 2:
        return math.acos(height) / math.pi
    num, _ = integrate.quad(dens, height, 1.0)
    den, _ = integrate.quad(dens, -1.0, 1.0)
    return num / den


def semi_infinite_power_reference(k: int, lower: float) -> float:
    """integral_lower^inf e^(-x/2) x^(k/2) dx via the upper incomplete Gamma."""
    from scipy import special

    a = k / 2 + 1
    return 2**a * special.gammaincc(a, lower / 2) * math.gamma(a)


def dense_goe_batch(seed: int, n: int, count: int) -> np.ndarray:
    """Dense GOE draws from the library's public scalar sampler."""
    from uncontrol.sampling import RngState, STREAM_GOE, sample_goe, substream_id

    mats = np.empty((count, n, n))
    for t in range(count):
        state = RngState(seed=seed, stream_id=substream_id(STREAM_GOE, t))
        mats[t] = sample_goe(state, n).to_dense()
    return mats
