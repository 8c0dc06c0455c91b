"""Closed forms and upper bounds for the near-uncontrollability probabilities.

Notation: A ~ GOE(n) with unit eigenvectors v_1..v_n, b a fixed or standard
Gaussian input vector, and

    P_{eps,b} = P(|<v_i, b>| < eps for some i),   b fixed, A random,
    P_eps     = the same probability with b ~ N(0, I_n) independent of A.

Provided here:

  * the n=2 closed forms for P_{eps,b} and P_eps,
  * the per-b union bound  P_{eps,b} <= n(1 - (1 - eps/|b|)^(n-1)),
  * the chi-square integral bound and its degree-(n-1) polynomial expansion,
  * the growth-rate bound on dP_eps/deps at 0,
  * spherical cap area bounds and the exact cap measure.

Every Gamma ratio is evaluated in log space; arcsin arguments are clipped to
[-1, 1] to absorb rounding at branch points. See docs/n2_closed_form.md for
the derivation of the n=2 formula for P_eps and an algebraically
inconsistent variant kept here as a Monte Carlo comparator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numerics import (
    DEFAULT_TOL,
    Tolerance,
    integrate_interval,
    integrate_semi_infinite,
    log_gamma,
    reg_incomplete_beta,
    sphere_area,
)

__all__ = [
    "BOUND_KINDS",
    "BoundValue",
    "CapSpec",
    "p_eps_b_exact_n2",
    "p_eps_exact_n2",
    "p_eps_n2_alt",
    "p_eps_b_bound",
    "p_eps_bound_integral",
    "p_eps_bound_poly",
    "growth_rate_bound",
    "cap_area_upper",
    "cap_area_lower",
    "cap_measure_exact",
]

BOUND_KINDS = frozenset(
    {
        "exact_n2",
        "per_b_exact_n2",
        "union_bound_per_b",
        "integral_bound",
        "poly_bound",
        "cap_upper",
        "cap_lower",
    }
)

_HALF_SQRT2 = math.sqrt(2.0) / 2.0


@dataclass(frozen=True)
class BoundValue:
    """A formula value: raw (may exceed 1), its clamp to [0,1], and a kind label."""

    raw: float
    clamped: float
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in BOUND_KINDS:
            raise ValueError(f"unknown bound kind: {self.kind!r}")
        expected = min(1.0, max(0.0, self.raw))
        if self.clamped != expected:
            raise ValueError(f"clamped={self.clamped} inconsistent with raw={self.raw}")


def _bound(raw: float, kind: str) -> BoundValue:
    return BoundValue(raw=raw, clamped=min(1.0, max(0.0, raw)), kind=kind)


@dataclass(frozen=True)
class CapSpec:
    """A spherical cap {theta in S^(n-1) : <theta, v> >= eps}.

    Construct with exactly one of `height` (the inner-product threshold eps)
    or `chord_radius` r; the other is derived from r^2 = 2(1 - eps). A height
    given directly must lie in [0, 1); a chord radius in [0, 2] (radii above
    sqrt(2) correspond to caps larger than a hemisphere, with height < 0).
    """

    n: int
    height: float = None  # type: ignore[assignment]
    chord_radius: float = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"cap dimension must be >= 2, got {self.n}")
        if (self.height is None) == (self.chord_radius is None):
            raise ValueError("specify exactly one of height or chord_radius")
        if self.chord_radius is None:
            if not 0.0 <= self.height < 1.0:
                raise ValueError(f"height must be in [0, 1), got {self.height}")
            object.__setattr__(self, "chord_radius", math.sqrt(2.0 * (1.0 - self.height)))
        else:
            if not 0.0 <= self.chord_radius <= 2.0:
                raise ValueError(f"chord_radius must be in [0, 2], got {self.chord_radius}")
            object.__setattr__(self, "height", 1.0 - 0.5 * self.chord_radius**2)


def _clip_unit(x: float) -> float:
    # Clamp to [-1, 1]; values beyond the interval only arise from roundoff.
    return max(-1.0, min(1.0, x))


def p_eps_b_exact_n2(eps: float, b_norm: float) -> BoundValue:
    """Exact P_{eps,b} for n=2: (4/pi) arcsin(eps/|b|) below the sqrt(2)/2 break, else 1."""
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if b_norm <= 0:
        raise ValueError(f"b_norm must be > 0, got {b_norm}")
    t = eps / b_norm
    if t < _HALF_SQRT2:
        raw = (4.0 / math.pi) * math.asin(_clip_unit(t))
    else:
        raw = 1.0
    return _bound(raw, "per_b_exact_n2")


def _n2_arcsin_integral(eps: float, tol: Tolerance) -> float:
    # integral over [2 eps^2, inf) of arcsin(eps/sqrt(r)) e^(-r/2) dr
    def f(r: float) -> float:
        return math.asin(_clip_unit(eps / math.sqrt(r))) * math.exp(-0.5 * r)

    return integrate_semi_infinite(f, 2.0 * eps * eps, tol).value


def p_eps_exact_n2(eps: float, tol: Tolerance = DEFAULT_TOL) -> BoundValue:
    """Exact P_eps for n=2.

    Averaging the per-b closed form over |b|^2 ~ chi-square(2) gives

        P_eps = (1 - e^(-eps^2))
                + (2/pi) * integral_{2 eps^2}^inf arcsin(eps/sqrt(r)) e^(-r/2) dr,

    where the first term is the mass of {|b|^2 <= 2 eps^2}, the region in
    which the per-b probability is 1. Quadrature error is kept within
    tol.abs_tol.
    """
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if eps == 0.0:
        return _bound(0.0, "exact_n2")
    raw = -math.expm1(-eps * eps) + (2.0 / math.pi) * _n2_arcsin_integral(eps, tol)
    return _bound(raw, "exact_n2")


def p_eps_n2_alt(eps: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Inconsistent variant of the n=2 closed form, kept only as a comparator.

    Uses 1 - e^(+2 eps^2) as the first term and 4/(sqrt(2) pi) as the
    integral coefficient. The first term is negative for eps > 0 and the
    total does not tend to 1 as eps grows, so this cannot be a probability;
    the Monte Carlo acceptance suite measures how far it falls from the
    estimates. See docs/n2_closed_form.md.
    """
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if eps == 0.0:
        return 0.0
    coeff = 4.0 / (math.sqrt(2.0) * math.pi)
    return -math.expm1(2.0 * eps * eps) + coeff * _n2_arcsin_integral(eps, tol)


def p_eps_b_bound(eps: float, b_norm: float, n: int) -> BoundValue:
    """Union bound P_{eps,b} <= n(1 - (1 - eps/|b|)^(n-1)); raw = n when eps >= |b|."""
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if b_norm <= 0:
        raise ValueError(f"b_norm must be > 0, got {b_norm}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    t = min(1.0, eps / b_norm)
    raw = n * (1.0 - (1.0 - t) ** (n - 1))
    return _bound(raw, "union_bound_per_b")


def _guarded_union_factor(eps: float, n: int, r: float) -> float:
    # min(1/n, 1 - (max(0, 1 - eps/sqrt(r)))^(n-1)): the per-b union bound
    # divided by n, capped so the implied probability never exceeds 1. The
    # cap keeps the r < eps^2 region (where the unguarded base goes negative)
    # from corrupting the bound.
    if r <= 0.0:
        return 1.0 / n
    base = 1.0 - eps / math.sqrt(r)
    if base <= 0.0:
        return 1.0 / n
    return min(1.0 / n, 1.0 - base ** (n - 1))


def _kink_radius(eps: float, n: int) -> float:
    # The r at which the guarded factor switches off the 1/n cap:
    # (1 - eps/sqrt(r))^(n-1) = 1 - 1/n.
    return (eps / (1.0 - (1.0 - 1.0 / n) ** (1.0 / (n - 1)))) ** 2


def p_eps_bound_integral(eps: float, n: int, tol: Tolerance = DEFAULT_TOL) -> BoundValue:
    """Chi-square integral bound on P_eps.

        P_eps <= n/(2^(n/2) Gamma(n/2)) *
                 integral_0^inf g(r) e^(-r/2) r^(n/2 - 1) dr

    with the guarded factor g(r) = min(1/n, 1 - (max(0, 1 - eps/sqrt(r)))^(n-1)).
    The integrand has a single kink where the cap releases; the integral is
    split there so each adaptive pass sees a smooth integrand.
    """
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if eps == 0.0:
        return _bound(0.0, "integral_bound")
    log_pref = math.log(n) - 0.5 * n * math.log(2.0) - log_gamma(0.5 * n)
    pref = math.exp(log_pref)

    def f(r: float) -> float:
        return _guarded_union_factor(eps, n, r) * math.exp(-0.5 * r) * r ** (0.5 * n - 1.0)

    rstar = _kink_radius(eps, n)
    piece_tol = Tolerance(
        abs_tol=0.5 * tol.abs_tol / max(pref, 1e-300),
        rel_tol=tol.rel_tol,
        max_evaluations=tol.max_evaluations,
    )
    head = integrate_interval(f, 0.0, rstar, piece_tol)
    tail = integrate_semi_infinite(f, rstar, piece_tol)
    raw = pref * (head.value + tail.value)
    return _bound(raw, "integral_bound")


def p_eps_bound_poly(eps: float, n: int) -> BoundValue:
    """Degree-(n-1) polynomial bound on P_eps, the expanded integral bound.

        sum_{k=1}^{n-1} (-1)^(k+1) C(n-1, k) n Gamma((n-k)/2) / (2^(k/2) Gamma(n/2)) eps^k

    Terms are evaluated in log space and summed with compensated addition.
    """
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if eps == 0.0:
        return _bound(0.0, "poly_bound")
    log_eps = math.log(eps)
    log_n = math.log(n)
    log_gamma_half_n = log_gamma(0.5 * n)
    terms = []
    for k in range(1, n):
        log_mag = (
            math.log(math.comb(n - 1, k))
            + log_n
            + log_gamma(0.5 * (n - k))
            - 0.5 * k * math.log(2.0)
            - log_gamma_half_n
            + k * log_eps
        )
        mag = math.exp(log_mag)
        terms.append(mag if k % 2 == 1 else -mag)
    return _bound(math.fsum(terms), "poly_bound")


def growth_rate_bound(n: int) -> float:
    """Bound on dP_eps/deps at eps = 0: n(n-1) Gamma((n-1)/2) / (sqrt(2) Gamma(n/2)).

    Equals the k=1 coefficient of the polynomial bound.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return math.exp(
        math.log(n)
        + math.log(n - 1)
        + log_gamma(0.5 * (n - 1))
        - 0.5 * math.log(2.0)
        - log_gamma(0.5 * n)
    )


def cap_area_upper(spec: CapSpec) -> float:
    """Upper bound e^(-n eps^2 / 2) A_n on the area of a height-eps cap."""
    if not 0.0 <= spec.height < 1.0:
        raise ValueError(f"cap_area_upper requires height in [0, 1), got {spec.height}")
    return math.exp(-0.5 * spec.n * spec.height**2) * sphere_area(spec.n)


def cap_area_lower(spec: CapSpec) -> float:
    """Lower bound (1/2) (r/2)^(n-1) A_n on the area of a chord-radius-r cap."""
    if not 0.0 <= spec.chord_radius <= 2.0:
        raise ValueError(
            f"cap_area_lower requires chord_radius in [0, 2], got {spec.chord_radius}"
        )
    return 0.5 * (0.5 * spec.chord_radius) ** (spec.n - 1) * sphere_area(spec.n)


def cap_measure_exact(n: int, height: float) -> float:
    """Normalized measure of {theta in S^(n-1) : theta_1 >= height}.

    Equals (1/2) I_{1-height^2}((n-1)/2, 1/2) for height in [0, 1], where I
    is the regularized incomplete beta function.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 <= height <= 1.0:
        raise ValueError(f"height must be in [0, 1], got {height}")
    return 0.5 * reg_incomplete_beta(1.0 - height * height, 0.5 * (n - 1), 0.5)
