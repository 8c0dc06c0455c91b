import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy import special as sp_special

from conftest import semi_infinite_power_reference
from uncontrol.numerics import (
    DEFAULT_TOL,
    QuadratureError,
    QuadratureResult,
    Tolerance,
    integrate_interval,
    integrate_semi_infinite,
    log_gamma,
    reg_incomplete_beta,
    sphere_area,
)


class TestLogGamma:
    def test_known_points(self):
        assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
        assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)
        assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)

    def test_matches_scipy_on_working_range(self):
        xs = np.linspace(0.5, 200.0, 2001)
        ours = np.array([log_gamma(float(x)) for x in xs])
        ref = sp_special.gammaln(xs)
        # ref=0 at x=1 and x=2; compare relative to 1+|ref| there
        err = np.abs(ours - ref) / np.maximum(np.abs(ref), 1e-3)
        assert float(err.max()) <= 1e-12

    def test_domain(self):
        with pytest.raises(ValueError):
            log_gamma(0.0)
        with pytest.raises(ValueError):
            log_gamma(-1.5)


class TestSphereArea:
    def test_known_values(self):
        assert sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-12)
        assert sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-12)
        assert sphere_area(1) == pytest.approx(2.0, rel=1e-12)

    def test_gamma_recurrence(self):
        # A_{n+2} = A_n * 2 pi / n
        for n in range(1, 51):
            lhs = sphere_area(n + 2)
            rhs = sphere_area(n) * 2.0 * math.pi / n
            assert abs(lhs - rhs) <= 1e-10 * abs(rhs)

    def test_domain(self):
        with pytest.raises(ValueError):
            sphere_area(0)


class TestRegIncompleteBeta:
    def test_endpoints(self):
        assert reg_incomplete_beta(0.0, 0.7, 2.3) == 0.0
        assert reg_incomplete_beta(1.0, 0.7, 2.3) == 1.0

    def test_uniform_case(self):
        for x in np.linspace(0.0, 1.0, 21):
            assert reg_incomplete_beta(float(x), 1.0, 1.0) == pytest.approx(float(x), abs=1e-13)

    def test_arcsin_closed_form(self):
        # I_x(1/2, 1/2) = (2/pi) arcsin(sqrt(x))
        got = reg_incomplete_beta(0.75, 0.5, 0.5)
        want = (2.0 / math.pi) * math.asin(math.sqrt(0.75))
        assert abs(got - want) <= 1e-10

    def test_symmetry_identity(self):
        for a in (0.5, 1.0, 2.5, 7.0):
            for b in (0.5, 1.5, 4.0):
                for x in (0.01, 0.2, 0.5, 0.8, 0.99):
                    s = reg_incomplete_beta(x, a, b) + reg_incomplete_beta(1.0 - x, b, a)
                    assert abs(s - 1.0) <= 1e-9

    def test_monotone_in_x(self):
        for a, b in ((0.5, 0.5), (2.0, 3.0), (4.5, 0.5)):
            xs = np.linspace(0.0, 1.0, 101)
            vals = [reg_incomplete_beta(float(x), a, b) for x in xs]
            assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))

    def test_matches_scipy(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            a = float(rng.uniform(0.3, 12.0))
            b = float(rng.uniform(0.3, 12.0))
            x = float(rng.uniform(0.0, 1.0))
            assert abs(reg_incomplete_beta(x, a, b) - sp_special.betainc(a, b, x)) <= 1e-10

    def test_domain(self):
        with pytest.raises(ValueError):
            reg_incomplete_beta(-0.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            reg_incomplete_beta(1.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            reg_incomplete_beta(0.5, 0.0, 1.0)
        with pytest.raises(ValueError):
            reg_incomplete_beta(0.5, 1.0, -2.0)


class TestSemiInfiniteQuadrature:
    def test_plain_exponential(self):
        r = integrate_semi_infinite(lambda x: math.exp(-0.5 * x), 0.0, DEFAULT_TOL)
        assert abs(r.value - 2.0) <= r.abs_error_estimate + 1e-15
        assert r.abs_error_estimate <= DEFAULT_TOL.abs_tol
        assert r.evaluations >= 5

    def test_exponential_times_sqrt(self):
        r = integrate_semi_infinite(lambda x: math.exp(-0.5 * x) * math.sqrt(x), 0.0, DEFAULT_TOL)
        # 2^(3/2) Gamma(3/2) = sqrt(2 pi); cross-check the constant with log_gamma
        want = math.exp(1.5 * math.log(2.0) + log_gamma(1.5))
        assert want == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-14)
        assert abs(r.value - want) <= 1e-9

    def test_shifted_lower_limit(self):
        r = integrate_semi_infinite(lambda x: math.exp(-0.5 * x), 2.0, DEFAULT_TOL)
        assert abs(r.value - 2.0 * math.exp(-1.0)) <= 1e-9

    def test_error_estimate_is_honest_on_power_family(self):
        # integrands e^(-x/2) x^(k/2), the envelope family of every formula here
        tol = Tolerance(abs_tol=1e-9)
        for k in range(0, 7):
            for lower in (0.0, 0.5, 2.0):
                exact = semi_infinite_power_reference(k, lower)
                r = integrate_semi_infinite(
                    lambda x, k=k: math.exp(-0.5 * x) * x ** (k / 2), lower, tol
                )
                assert abs(r.value - exact) <= r.abs_error_estimate + 1e-12
                assert r.abs_error_estimate <= tol.abs_tol

    def test_linearity(self):
        f = lambda x: math.exp(-0.5 * x)
        g = lambda x: math.exp(-0.5 * x) * math.sqrt(x)
        alpha, beta = 2.5, -1.25
        rf = integrate_semi_infinite(f, 0.0, DEFAULT_TOL)
        rg = integrate_semi_infinite(g, 0.0, DEFAULT_TOL)
        rc = integrate_semi_infinite(lambda x: alpha * f(x) + beta * g(x), 0.0, DEFAULT_TOL)
        budget = rc.abs_error_estimate + abs(alpha) * rf.abs_error_estimate + abs(beta) * rg.abs_error_estimate
        assert abs(rc.value - (alpha * rf.value + beta * rg.value)) <= budget + 1e-14

    def test_deterministic(self):
        f = lambda x: math.exp(-0.5 * x) * math.sqrt(x)
        r1 = integrate_semi_infinite(f, 0.3, DEFAULT_TOL)
        r2 = integrate_semi_infinite(f, 0.3, DEFAULT_TOL)
        assert r1.value == r2.value
        assert r1.evaluations == r2.evaluations

    def test_budget_exhaustion_carries_best(self):
        tight = Tolerance(abs_tol=1e-14, max_evaluations=25)
        with pytest.raises(QuadratureError) as info:
            integrate_semi_infinite(lambda x: math.exp(-0.5 * x) * math.sin(40.0 * x) ** 2, 0.0, tight)
        best = info.value.best
        assert isinstance(best, QuadratureResult)
        assert math.isfinite(best.value)
        assert best.abs_error_estimate > 0.0


class TestFiniteQuadrature:
    def test_polynomial(self):
        r = integrate_interval(lambda x: x * x, 0.0, 1.0, DEFAULT_TOL)
        assert abs(r.value - 1.0 / 3.0) <= 1e-12

    def test_against_scipy(self):
        f = lambda x: math.exp(-x) * math.cos(3.0 * x)
        want, _ = sp_integrate.quad(f, 0.0, 4.0)
        r = integrate_interval(f, 0.0, 4.0, DEFAULT_TOL)
        assert abs(r.value - want) <= 1e-9

    def test_empty_interval(self):
        r = integrate_interval(lambda x: 1.0, 2.0, 2.0, DEFAULT_TOL)
        assert r.value == 0.0


class TestTypes:
    def test_tolerance_validation(self):
        with pytest.raises(ValueError):
            Tolerance(abs_tol=0.0)
        with pytest.raises(ValueError):
            Tolerance(abs_tol=1e-8, rel_tol=-0.1)
        with pytest.raises(ValueError):
            Tolerance(abs_tol=1e-8, max_evaluations=14)

    def test_result_validation(self):
        with pytest.raises(ValueError):
            QuadratureResult(value=1.0, abs_error_estimate=-1e-3, evaluations=5)
        with pytest.raises(ValueError):
            QuadratureResult(value=1.0, abs_error_estimate=0.0, evaluations=0)
