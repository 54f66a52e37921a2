"""Tests for Lebesgue-Stieltjes integrals and measures."""

import math

import numpy as np
import pytest

from app.src.derivator import ContinuousPart, Derivator, JumpSet
from app.src.errors import AccuracyError, DomainError
from app.src.stieltjes_integral import (
    DEFAULT_QUADRATURE,
    QuadratureSettings,
    jump_sum,
    jump_weighted_measure,
    ls_integral,
    ls_integral_between,
    ls_measure,
)

TOL = 1e-10


def _rs_sum(d, f, a, b, n):
    s = np.linspace(a, b, n + 1)
    fv = f(s)
    return float(np.sum(0.5 * (fv[1:] + fv[:-1]) * np.diff(d.eval_many(s))))


def _romberg_rs_sum(d, f, a, b, n=256):
    # g is linear on [a, b], so the trapezoidal sums carry an even error expansion in h.
    t1, t2, t4 = (_rs_sum(d, f, a, b, k * n) for k in (1, 2, 4))
    return (64 * t4 - 20 * t2 + t1) / 45


class TestLsIntegral:

    def test_lebesgue_measure(self, identity_d):
        assert ls_integral(identity_d, lambda s: 1.0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_pure_jump_is_exact_jump_sum(self):
        d = Derivator.pure_jump(2.0, [(0.5, 2.0)])
        assert ls_integral(d, lambda s: s, 1.0) == 1.0

    def test_g2_measure_up_to_second_jump(self, g2_d):
        # The jump at pi/2 itself is excluded by the half-open interval.
        value = ls_integral(g2_d, lambda s: 1.0, math.pi / 2)
        assert value.real == pytest.approx(1.0 + 1.0 / 3.0, abs=1e-12)

    def test_complex_integrand(self, identity_d):
        value = ls_integral(identity_d, lambda s: complex(math.cos(s), math.sin(s)), 1.5)
        expected = complex(math.sin(1.5), 1.0 - math.cos(1.5))
        assert abs(value - expected) < TOL

    def test_piecewise_linear_against_exact(self):
        # int cos dg = sum slope_i (sin b_i - sin a_i) for a continuous piecewise-linear g.
        cont = ContinuousPart.piecewise_linear([(0.0, 2.0), (1.0, 0.0), (2.0, 0.5)], 3.0)
        d = Derivator(cont)
        expected = 2.0 * math.sin(1.0) + 0.5 * (math.sin(3.0) - math.sin(2.0))
        assert ls_integral(d, math.cos, 3.0).real == pytest.approx(expected, abs=TOL)

    def test_jump_uses_value_at_jump_time(self):
        d = Derivator.identity(1.0, [(0.5, 2.0)])
        step = lambda s: 1.0 if s >= 0.5 else 0.0
        assert ls_integral(d, step, 1.0).real == pytest.approx(0.5 + 2.0, abs=1e-12)

    def test_jump_at_upper_end_excluded(self, one_jump_d):
        assert ls_integral(one_jump_d, lambda s: 1.0, 0.5).real == pytest.approx(0.5, abs=1e-12)
        after = ls_integral(one_jump_d, lambda s: 1.0, math.nextafter(0.5, math.inf))
        assert after.real == pytest.approx(1.5, abs=1e-12)

    def test_flat_interval_contributes_nothing(self, gremark_d):
        assert ls_integral_between(gremark_d, lambda s: 1.0 / (1.0 + s), 1.0, 2.0) == 0

    def test_out_of_window(self, identity_d):
        with pytest.raises(DomainError):
            ls_integral(identity_d, lambda s: 1.0, 3.0)

    def test_accuracy_error_on_exhausted_budget(self, identity_d):
        q = QuadratureSettings(max_subdivisions=1)
        with pytest.raises(AccuracyError) as info:
            ls_integral(identity_d, lambda s: math.sin(50 * s), 2.0, q)
        assert info.value.error_bound > 0
        assert info.value.module == "stieltjes_integral"


class TestLsMeasure:

    def test_identity(self, identity_d):
        assert ls_measure(identity_d, 0.2, 0.8) == pytest.approx(0.6, abs=1e-12)

    def test_jump_mass(self):
        d = Derivator.identity(1.0, [(0.5, 1.0)])
        assert ls_measure(d, 0.5, 0.5 + 1e-9) == pytest.approx(1.0, abs=1e-8)

    def test_flat(self, gremark_d):
        assert ls_measure(gremark_d, 1.0, 2.0) == 0.0

    def test_reversed_interval(self, identity_d):
        with pytest.raises(DomainError):
            ls_measure(identity_d, 0.8, 0.2)


class TestProperties:

    def test_additivity(self, make_derivator, rng):
        f = lambda s: math.exp(-s) * math.cos(3 * s)
        for _ in range(10):
            d = make_derivator()
            s, t = np.sort(rng.uniform(0, d.T, 2))
            whole = ls_integral(d, f, t)
            parts = ls_integral(d, f, s) + ls_integral_between(d, f, s, t)
            assert abs(whole - parts) < TOL

    def test_matches_riemann_stieltjes_sums(self, make_derivator, rng):
        f = lambda s: np.exp(-s) * np.cos(3 * s)
        for _ in range(20):
            d = Derivator(make_derivator().cont)
            t = float(rng.uniform(0.2 * d.T, d.T))
            cuts = [b for b in d.breakpoints() if b < t] + [t]
            direct = sum(_romberg_rs_sum(d, f, a, b) for a, b in zip(cuts[:-1], cuts[1:]))
            assert abs(ls_integral(d, f, t) - direct) <= 10 * DEFAULT_QUADRATURE.abs_tol

    def test_linearity(self, flat_jump_d):
        f1, f2 = math.sin, lambda s: s * s
        lhs = ls_integral(flat_jump_d, lambda s: 2.0 * f1(s) - 3.0 * f2(s), 2.7)
        rhs = 2.0 * ls_integral(flat_jump_d, f1, 2.7) - 3.0 * ls_integral(flat_jump_d, f2, 2.7)
        assert abs(lhs - rhs) < TOL

    def test_monotone_in_t_for_nonnegative_f(self, flat_jump_d):
        ts = np.linspace(0, flat_jump_d.T, 25)
        values = [ls_integral(flat_jump_d, lambda s: 1.0 + math.sin(s) ** 2, t).real for t in ts]
        assert all(b >= a - 1e-14 for a, b in zip(values, values[1:]))

    def test_measure_of_constant_one(self, make_derivator, rng):
        for _ in range(10):
            d = make_derivator()
            t = float(rng.uniform(0, d.T))
            assert ls_integral(d, lambda s: 1.0, t).real == pytest.approx(ls_measure(d, 0.0, t), abs=1e-12)

    def test_jump_sum_window(self, two_jump_d):
        f = lambda s: 10.0 * s
        assert jump_sum(two_jump_d, f, 0.0, 2.0) == pytest.approx(10 * 0.5 * 0.5 + 10 * 1.25 * 0.25)
        assert jump_sum(two_jump_d, f, 0.5, 1.25) == pytest.approx(10 * 0.5 * 0.5)


class TestJumpWeightedMeasure:

    def test_value(self):
        d = Derivator.identity(2.0, [(0.5, 1.0), (1.5, 3.0)])
        value = jump_weighted_measure(d, lambda delta: 1.0 / (1.0 + delta), 2.0)
        assert value.real == pytest.approx(2.0 + 0.5 * 1.0 + 0.25 * 3.0, abs=1e-14)

    def test_matches_quadrature(self, flat_jump_d):
        lam = -0.4
        exact = jump_weighted_measure(flat_jump_d, lambda delta: 1.0 / (1.0 + lam * delta), 2.8)
        numeric = ls_integral(flat_jump_d, lambda s: 1.0 / (1.0 + lam * flat_jump_d.jump_at(s)), 2.8)
        assert abs(exact - numeric) < TOL
