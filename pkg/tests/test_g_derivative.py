"""Tests for the numerical g-derivative operator and the residual oracle."""

import math

import numpy as np
import pytest

from app.src.derivator import ContinuousPart, Derivator
from app.src.errors import DomainError
from app.src.first_order import g_exp
from app.src.g_derivative import (
    GDiffSettings,
    g_derivative_at,
    g_derivative_right,
    residual,
    richardson,
)
from app.src.stieltjes_integral import ls_integral

TOL = 1e-6


def _step_source(t):
    """t - 1 on [0, 1], 2 afterwards."""
    return t - 1.0 if t <= 1.0 else 2.0


class TestPointClasses:

    def test_classical_derivative(self, identity_d):
        assert g_derivative_at(identity_d, lambda t: t * t, 0.5) == pytest.approx(1.0, abs=1e-8)

    def test_jump_quotient_is_exact(self):
        d = Derivator.identity(2.0, [(1.0, 2.0)])
        assert g_derivative_at(d, _step_source, 1.0) == pytest.approx(1.0, abs=1e-12)
        assert g_derivative_at(d, lambda t: t if t <= 1.0 else 2.0, 1.0) == pytest.approx(0.5, abs=1e-12)

    def test_explicit_right_limit(self, one_jump_d):
        value = g_derivative_at(one_jump_d, lambda t: 0.0, 0.5, right=lambda t: 3.0)
        assert value == 3.0

    def test_flat_interior_uses_right_end(self, gremark_d):
        f = lambda t: t * t
        # On (1, 2) the derivative is transported from b = 2, where g resumes with slope 1.
        assert g_derivative_at(gremark_d, f, 1.5) == pytest.approx(4.0, abs=TOL)
        assert g_derivative_at(gremark_d, f, 2.0) == pytest.approx(4.0, abs=TOL)

    def test_flat_left_end_is_backward(self, gremark_d):
        assert g_derivative_at(gremark_d, lambda t: t * t, 1.0) == pytest.approx(2.0, abs=TOL)

    def test_near_kink_regular_point(self):
        d = Derivator(ContinuousPart.piecewise_linear([(0.0, 1.0), (1.0, 3.0)], 2.0))
        # Just right of the kink g has slope 3, so (t^2)'_g = 2t/3.
        t = 1.0 + 1e-4
        assert g_derivative_at(d, lambda s: s * s, t) == pytest.approx(2 * t / 3, abs=TOL)

    def test_window_ends(self, identity_d):
        assert g_derivative_at(identity_d, math.exp, 0.0) == pytest.approx(1.0, abs=TOL)
        assert g_derivative_at(identity_d, math.exp, 2.0) == pytest.approx(math.exp(2.0), abs=1e-5)

    def test_right_derivative_at_jump(self, one_jump_d):
        # f = t^2 + [t > 0.5]; just after the jump the classical slope resumes.
        f = lambda t: t * t + (1.0 if t > 0.5 else 0.0)
        after = lambda t: t * t + 1.0
        assert g_derivative_right(one_jump_d, f, 0.5, right=after) == pytest.approx(1.0, abs=1e-8)


class TestStepRemark:
    """f = t - 1 then 2, g = t plus a jump of 2 at 1: f^2 is g-differentiable but not g-continuous."""

    def test_square_at_jump(self):
        d = Derivator.identity(2.0, [(1.0, 2.0)])
        f2 = lambda t: _step_source(t) ** 2
        assert g_derivative_at(d, f2, 1.0) == pytest.approx(2.0, abs=1e-12)

    def test_square_left_limit_is_zero(self):
        d = Derivator.identity(2.0, [(1.0, 2.0)])
        f2 = lambda t: _step_source(t) ** 2
        approach = [abs(g_derivative_at(d, f2, 1.0 - eps)) for eps in (1e-2, 1e-4, 1e-6)]
        assert approach[-1] < 1e-5
        assert approach == sorted(approach, reverse=True)


class TestIntegralDerivative:

    def test_derivative_of_integral_recovers_integrand(self, rng):
        d = Derivator(ContinuousPart.piecewise_linear([(0.0, 1.0), (1.0, 2.0)], 2.0))
        h = lambda s: math.cos(3 * s) + s

        def H(x):
            return ls_integral(d, h, x)

        xs = np.concatenate([rng.uniform(0.05, 0.95, 5), rng.uniform(1.05, 1.95, 5)])
        for x in xs:
            assert abs(g_derivative_at(d, H, x) - h(x)) < TOL

    def test_at_jump(self, one_jump_d):
        h = lambda s: 2.0 + math.sin(s)
        H = lambda x: ls_integral(one_jump_d, h, x)
        assert abs(g_derivative_at(one_jump_d, H, 0.5) - h(0.5)) < TOL


class TestCalculusRules:

    @staticmethod
    def _f1(t):
        return t * t + (1.0 if t > 0.5 else 0.0)

    @staticmethod
    def _f2(t):
        return math.cos(t) + (0.5 if t > 0.5 else 0.0)

    def _points(self, rng):
        return [0.5] + rng.uniform(0.6, 1.9, 5).tolist() + rng.uniform(0.05, 0.45, 3).tolist()

    def test_product_rule(self, one_jump_d, rng):
        d, f1, f2 = one_jump_d, self._f1, self._f2
        for t in self._points(rng):
            d1, d2 = g_derivative_at(d, f1, t), g_derivative_at(d, f2, t)
            prod = g_derivative_at(d, lambda s: f1(s) * f2(s), t)
            expected = d1 * f2(t) + d2 * f1(t) + d1 * d2 * d.jump_at(t)
            assert abs(prod - expected) < TOL

    def test_cross_term_vanishes_for_continuous_factor(self, one_jump_d, rng):
        d, f2 = one_jump_d, self._f2
        for t in self._points(rng):
            d1, d2 = g_derivative_at(d, math.sin, t), g_derivative_at(d, f2, t)
            prod = g_derivative_at(d, lambda s: math.sin(s) * f2(s), t)
            assert abs(prod - (d1 * f2(t) + d2 * math.sin(t))) < TOL

    def test_chain_rule_at_continuity_points(self, gremark_d, rng):
        for t in rng.uniform(0.05, 0.95, 5):
            lhs = g_derivative_at(gremark_d, lambda s: math.exp(math.sin(s)), t)
            rhs = math.exp(math.sin(t)) * g_derivative_at(gremark_d, math.sin, t)
            assert abs(lhs - rhs) < TOL

    def test_chain_rule_across_jump(self, one_jump_d):
        f, h, t0 = self._f1, math.exp, 0.5
        f_plus = f(t0 + 1e-9 * 2.0)
        secant = (h(f_plus) - h(f(t0))) / (f_plus - f(t0))
        lhs = g_derivative_at(one_jump_d, lambda s: h(f(s)), t0)
        assert abs(lhs - secant * g_derivative_at(one_jump_d, f, t0)) < 1e-9


class TestResidual:

    def test_first_order_exponential(self, two_jump_d):
        beta = -0.8
        e = g_exp(two_jump_d, beta)
        grid = np.linspace(0, 1.9, 50).tolist() + list(two_jump_d.jumps.times)
        assert residual(two_jump_d, e, (beta,), None, grid) < TOL

    def test_second_order_classical(self):
        d = Derivator.identity(1.0)
        l1, l2 = -0.5, 1.2
        v = lambda t: math.exp(l1 * t)
        grid = np.linspace(0, 1, 50).tolist()
        assert residual(d, v, (-(l1 + l2), l1 * l2), 0.0, grid) < TOL

    def test_bad_coefficients(self, identity_d):
        with pytest.raises(DomainError):
            residual(identity_d, math.sin, (1.0, 2.0, 3.0), None, [0.5])


class TestSettings:

    def test_steps_must_decrease(self):
        with pytest.raises(DomainError):
            GDiffSettings(step_sequence=(1e-3, 1e-3))
        with pytest.raises(DomainError):
            GDiffSettings(step_sequence=(1e-3, -1e-4))

    def test_relative_steps(self, gremark_d):
        assert GDiffSettings().steps_for(gremark_d) == pytest.approx([3e-3, 1.5e-3, 7.5e-4])

    def test_richardson_removes_known_terms(self):
        steps = [0.1, 0.05, 0.025]
        values = [1.0 + 2 * h ** 2 + 3 * h ** 4 for h in steps]
        assert richardson(steps, values, (2, 4)) == pytest.approx(1.0, abs=1e-13)

    def test_without_extrapolation(self, identity_d):
        s = GDiffSettings(richardson=False)
        assert g_derivative_at(identity_d, math.exp, 1.0, s) == pytest.approx(math.e, abs=1e-5)
