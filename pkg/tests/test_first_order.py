"""Tests for the g-exponential, g-trigonometric functions and first-order linear problems."""

import cmath
import logging
import math

import numpy as np
import pytest

from app.src.derivator import Derivator
from app.src.errors import DomainError, TruncationError
from app.src.first_order import (
    Coefficient,
    g_exp,
    g_exp_properties_check,
    g_sin_cos,
    g_sin_cos_explicit,
    green_first_order,
    inverse_coefficient,
    modulated_coefficient,
    real_case_exp,
    solve_first_order,
)
from app.src.second_order import SecondOrderProblem, solve_homogeneous
from app.src.stieltjes_integral import continuous_integral

TOL = 1e-12


# ============================================================
# G-EXPONENTIAL
# ============================================================


class TestGExp:

    def test_identity_is_classical(self, identity_d):
        e = g_exp(identity_d, -0.7)
        for t in (0.0, 0.3, 1.1, 2.0):
            assert abs(e(t) - math.exp(-0.7 * t)) < TOL

    def test_complex_classical(self, identity_d):
        beta = 0.2 + 1.5j
        e = g_exp(identity_d, beta)
        assert abs(e(1.3) - cmath.exp(beta * 1.3)) < TOL

    def test_pure_jump(self):
        d = Derivator.pure_jump(2.0, [(0.5, 1.0)])
        e = g_exp(d, 1.0)
        assert e(0.5) == pytest.approx(1.0, abs=TOL)
        assert e(1.0) == pytest.approx(2.0, abs=TOL)

    def test_initial_value_scales(self, two_jump_d):
        assert abs(g_exp(two_jump_d, 0.4, v0=3.0)(1.7) - 3.0 * g_exp(two_jump_d, 0.4)(1.7)) < TOL

    def test_flat_interval_is_constant(self, gremark_d):
        e = g_exp(gremark_d, -1.0)
        assert e(1.0) == e(1.5) == e(2.0)
        assert e(1.0) == pytest.approx(math.exp(-1.0), abs=TOL)

    def test_real_case_sign(self, one_jump_d):
        e = g_exp(one_jump_d, -3.0)
        expected = real_case_exp(one_jump_d, -3.0, 1.0)
        assert expected < 0
        assert expected == pytest.approx(-2.0 * math.exp(-3.0), abs=TOL)
        assert abs(e(1.0) - expected) < TOL

    def test_decomposition(self, make_derivator, rng):
        for _ in range(10):
            d = make_derivator()
            beta = float(rng.uniform(-3.0, 3.0))
            e = g_exp(d, beta)
            for t in rng.uniform(0, d.T, 5):
                expected = real_case_exp(d, beta, t)
                assert abs(e(t) - expected) <= 1e-12 * max(1.0, abs(expected))

    def test_modulus_bound(self, make_derivator, rng):
        for _ in range(10):
            d = make_derivator()
            beta = complex(*rng.uniform(-2.0, 2.0, 2))
            e = g_exp(d, beta)
            for t in rng.uniform(0, d.T, 5):
                assert abs(e(t)) <= math.exp(abs(beta) * d.eval(t)) * (1 + 1e-12)

    def test_jump_relation(self, make_derivator, rng):
        for _ in range(50):
            d = make_derivator()
            beta = complex(*rng.uniform(-2.0, 2.0, 2))
            e = g_exp(d, beta)
            for t_k, delta in d.jumps:
                after = e(math.nextafter(t_k, math.inf))
                assert abs(e.value_right(t_k) - (1 + beta * delta) * e(t_k)) <= 1e-12 * max(1.0, abs(e(t_k)))
                assert abs(after - e.value_right(t_k)) <= 1e-10 * max(1.0, abs(after))

    def test_time_dependent_coefficient(self, one_jump_d):
        # beta(t) = t: exponent t^2 / 2 on the continuous part, factor 1.5 at the jump.
        e = g_exp(one_jump_d, lambda t: t)
        assert abs(e(1.0) - 1.5 * math.exp(0.5)) < 1e-10


class TestTruncation:

    def test_factor_vanishes(self, one_jump_d):
        e = g_exp(one_jump_d, -1.0)
        assert e.truncated
        assert e.truncation == 0.5
        assert e(0.5) == pytest.approx(math.exp(-0.5), abs=TOL)
        assert e.value_right(0.5) == 0
        assert e(1.5) == 0

    def test_inverse_past_truncation(self, one_jump_d):
        e = g_exp(one_jump_d, -1.0)
        with pytest.raises(TruncationError) as exc:
            e.inverse(1.0)
        assert exc.value.t0 == 0.5

    def test_no_truncation_means_full_window(self, two_jump_d):
        e = g_exp(two_jump_d, 1.0)
        assert not e.truncated
        assert e.truncation == two_jump_d.T

    def test_near_vanishing_factor_warns(self, one_jump_d, caplog):
        with caplog.at_level(logging.WARNING):
            e = g_exp(one_jump_d, -1.0 + 1e-12)
        assert not e.truncated
        assert "nearly zero" in caplog.text

    def test_properties_up_to_truncation(self, one_jump_d):
        report = g_exp_properties_check(one_jump_d, -1.0)
        assert report["max_deviation"] <= 1e-12

    def test_properties_with_jumps_past_truncation(self, two_jump_d):
        # 1 - 2 * 0.5 = 0 at the first jump; the second jump lies past t0.
        report = g_exp_properties_check(two_jump_d, -2.0 + 0j, n=3, times=[0.0, 0.2, 0.5])
        assert report["inverse"] <= 1e-12
        assert report["negative_power"] <= 1e-12

    def test_inverse_coefficient_at_truncation(self, one_jump_d):
        c = inverse_coefficient(one_jump_d, Coefficient.constant(-1.0))
        assert c(0.2) == pytest.approx(1.0)
        with pytest.raises(TruncationError) as exc:
            c(0.5)
        assert exc.value.t0 == 0.5

    def test_solution_past_truncation(self, one_jump_d):
        sol = solve_first_order(one_jump_d, -1.0)
        with pytest.raises(TruncationError):
            sol(1.0)
        frame = sol.trajectory(21).to_frame()
        assert frame.loc[frame["t"] > 0.5, "value"].isna().all()
        assert frame.loc[frame["t"] < 0.5, "value"].notna().all()


class TestProperties:

    def test_identity(self, identity_d):
        assert g_exp_properties_check(identity_d, 0.7)["max_deviation"] <= 1e-12

    def test_single_jump_square(self):
        d = Derivator.identity(2.0, [(0.5, 2.0)])
        report = g_exp_properties_check(d, 1.0, n=2)
        assert report["power"] <= 1e-12
        assert report["max_deviation"] <= 1e-12

    def test_random_complex(self, make_derivator, rng):
        for _ in range(5):
            d = make_derivator()
            beta = complex(*rng.uniform(-1.5, 1.5, 2))
            assert g_exp_properties_check(d, beta, n=3)["max_deviation"] <= 1e-10

    def test_explicit_other_coefficient(self, two_jump_d):
        report = g_exp_properties_check(two_jump_d, 0.5, other=-1.2 + 0.3j)
        assert report["product"] <= 1e-12

    def test_power_needs_two(self, identity_d):
        with pytest.raises(DomainError):
            g_exp_properties_check(identity_d, 1.0, n=1)

    def test_sample_past_truncation(self, one_jump_d):
        with pytest.raises(TruncationError):
            g_exp_properties_check(one_jump_d, -1.0, times=[0.2, 1.0])


class TestCoefficients:

    def test_constant(self):
        c = Coefficient.of(2.5)
        assert c.const == 2.5 and c(0.3) == 2.5
        assert c.is_real

    def test_callable_has_no_constant(self):
        c = Coefficient.of(lambda t: 2 * t)
        assert c.const is None
        assert c(1.5) == 3.0

    def test_modulated(self, one_jump_d):
        c = modulated_coefficient(one_jump_d, 1.0, 2.0)
        assert c(0.5) == pytest.approx(1.0)
        assert c(0.7) == pytest.approx(2.0)

    def test_complex_exponential_splits_with_modulated_part(self, one_jump_d):
        a, b = 0.5, 1.5
        m = modulated_coefficient(one_jump_d, a, b)
        imag = Coefficient(func=lambda t: 1j * m(t), const=1j * b)
        whole = g_exp(one_jump_d, complex(a, b))
        real_part = g_exp(one_jump_d, a)
        for t in (0.3, 1.0, 1.8):
            assert abs(whole(t) - real_part(t) * g_exp(one_jump_d, imag)(t)) < 1e-10
        # Splitting with the unmodulated b only holds before the jump.
        naive = real_part(1.0) * g_exp(one_jump_d, 1j * b)(1.0)
        assert abs(whole(1.0) - naive) > 0.5
        assert abs(whole(0.3) - real_part(0.3) * g_exp(one_jump_d, 1j * b)(0.3)) < 1e-10


# ============================================================
# G-SINE / G-COSINE
# ============================================================


class TestSinCos:

    def test_identity_is_classical(self, identity_d):
        sc = g_sin_cos(identity_d, 1.7)
        for t in (0.2, 0.9, 1.8):
            assert sc.sin(t) == pytest.approx(math.sin(1.7 * t), abs=TOL)
            assert sc.cos(t) == pytest.approx(math.cos(1.7 * t), abs=TOL)

    def test_at_origin(self, g2_d):
        sc = g_sin_cos(g2_d, 2.0)
        assert sc.sin(0.0) == 0.0
        assert sc.cos(0.0) == 1.0

    def test_modulus_grows_at_jumps(self, one_jump_d):
        b = 1.5
        sc = g_sin_cos(one_jump_d, b)
        assert sc.sin(0.3) ** 2 + sc.cos(0.3) ** 2 == pytest.approx(1.0, abs=TOL)
        assert sc.sin(1.0) ** 2 + sc.cos(1.0) ** 2 == pytest.approx(1.0 + b * b, abs=TOL)

    def test_explicit_form_agrees(self, g2_d, rng):
        sc = g_sin_cos(g2_d, 2.0)
        for t in rng.uniform(0, g2_d.T, 10):
            s, c = g_sin_cos_explicit(g2_d, 2.0, t)
            assert sc.sin(t) == pytest.approx(s, abs=1e-10)
            assert sc.cos(t) == pytest.approx(c, abs=1e-10)

    def test_right_limits(self, one_jump_d):
        sc = g_sin_cos(one_jump_d, 1.0)
        # Post-jump values follow (1 + i) times the pre-jump exponential.
        z = complex(sc.cos(0.5), sc.sin(0.5)) * (1 + 1j)
        assert sc.cos_right(0.5) == pytest.approx(z.real, abs=TOL)
        assert sc.sin_right(0.5) == pytest.approx(z.imag, abs=TOL)

    def test_complex_coefficient_rejected(self, identity_d):
        with pytest.raises(DomainError):
            g_sin_cos(identity_d, 1.0 + 1.0j)

    def test_complex_callable_coefficient_rejected(self, one_jump_d):
        with pytest.raises(DomainError):
            g_sin_cos(one_jump_d, lambda t: 2.0 + (1j if t == 0.5 else 0.0))
        g_sin_cos(one_jump_d, lambda t: 2.0 + t)

    def test_trajectories_have_post_rows(self, one_jump_d):
        sin_t, cos_t = g_sin_cos(one_jump_d, 1.0).trajectories(11)
        assert int(sin_t.post.sum()) == 1
        assert cos_t.values[0] == 1.0


# ============================================================
# NON-HOMOGENEOUS PROBLEM
# ============================================================


class TestSolveFirstOrder:

    def test_without_source_is_exponential(self, two_jump_d):
        sol = solve_first_order(two_jump_d, 0.6, v0=2.0)
        e = g_exp(two_jump_d, 0.6)
        assert abs(sol(1.8) - 2.0 * e(1.8)) < TOL
        assert sol.particular(1.8) == 0

    def test_constant_source_adds_measure(self, one_jump_d):
        # v'_g = 1 integrates to v0 + g(t).
        sol = solve_first_order(one_jump_d, 0.0, f=1.0, v0=1.0)
        assert abs(sol(0.5) - 1.5) < 1e-10
        assert abs(sol.value_right(0.5) - 2.5) < 1e-10
        assert abs(sol(1.0) - 3.0) < 1e-10

    def test_classical_variation_of_constants(self, identity_d):
        beta, f = -0.5, 0.8
        sol = solve_first_order(identity_d, beta, f=f, v0=1.0)
        for t in (0.4, 1.0, 2.0):
            expected = (1.0 + f / beta) * math.exp(beta * t) - f / beta
            assert abs(sol(t) - expected) < 1e-10

    def test_jump_relation(self, two_jump_d):
        sol = solve_first_order(two_jump_d, -0.4, f=lambda t: math.cos(t))
        for t_k, delta in two_jump_d.jumps:
            v = sol(t_k)
            after = sol(math.nextafter(t_k, math.inf))
            assert abs(sol.value_right(t_k) - (v + (-0.4 * v + math.cos(t_k)) * delta)) < 1e-12
            assert abs(after - sol.value_right(t_k)) < 1e-9

    def test_trajectory_starts_at_initial_value(self, one_jump_d):
        frame = solve_first_order(one_jump_d, 0.3, f=0.5, v0=2.0).trajectory(11).to_frame()
        assert frame["value"].iloc[0] == pytest.approx(2.0)
        assert list(frame.columns) == ["t", "value", "value_im", "post"]


class TestGreenKernel:

    def test_support(self, one_jump_d):
        G = green_first_order(one_jump_d, 1.0)
        assert G(0.5, 1.0) == 0
        assert G(1.0, 1.0) == 0

    def test_classical_kernel(self, identity_d):
        G = green_first_order(identity_d, -0.5)
        assert abs(G(1.5, 0.4) - math.exp(-0.5 * 1.1)) < TOL

    def test_jump_factor(self, one_jump_d):
        G = green_first_order(one_jump_d, 1.0)
        assert abs(G(1.0, 0.5) - math.exp(0.5)) < TOL

    def test_convolution_is_particular_solution(self, two_jump_d):
        f = lambda r: 1.0 + r * r
        G = green_first_order(two_jump_d, -0.3)
        sol = solve_first_order(two_jump_d, -0.3, f=f, v0=0.0)
        for t in (0.3, 0.9, 1.6):
            assert abs(G.convolve(f, t) - sol(t)) < 1e-10

    def test_convolution_on_random_derivators(self, make_derivator, rng):
        for _ in range(10):
            d = make_derivator()
            beta = complex(*rng.uniform(-1.0, 1.0, 2))
            w = float(rng.uniform(0.5, 3.0))
            f = lambda r, w=w: math.cos(w * r) + 0.5
            G = green_first_order(d, beta)
            sol = solve_first_order(d, beta, f=f, v0=0.0)
            t = float(rng.uniform(0.1 * d.T, d.T))
            direct = sol(t)
            assert abs(G.convolve(f, t) - direct) <= 1e-7 * max(1.0, abs(direct))

    def test_past_truncation(self, one_jump_d):
        G = green_first_order(one_jump_d, -1.0)
        with pytest.raises(TruncationError):
            G(1.0, 0.2)


def test_sampled_values_are_complex_arrays(two_jump_d):
    traj = solve_first_order(two_jump_d, 1j).trajectory(9)
    assert traj.values.dtype == np.complex128
    assert not traj.is_real


class TestCompositeSolutions:

    def test_exponential_source(self, two_jump_d):
        # v' = x v + exp_g(z), v(0) = 1 has v = exp_g(x) + (exp_g(z) - exp_g(x)) / (z - x).
        x, z = -0.5, 0.8
        e_x, e_z = g_exp(two_jump_d, x), g_exp(two_jump_d, z)
        sol = solve_first_order(two_jump_d, x, f=e_z, v0=1.0)
        for t in (0.3, 0.5, 1.0, 1.25, 2.0):
            expected = e_x(t) + (e_z(t) - e_x(t)) / (z - x)
            assert abs(sol(t) - expected) < 1e-10

    def test_exponential_source_solves_second_order(self, two_jump_d):
        # The same v solves v'' - (x + z) v' + x z v = 0 with v(0) = 1, v'(0) = x + 1.
        x, z = -0.5, 0.8
        sol = solve_first_order(two_jump_d, x, f=g_exp(two_jump_d, z), v0=1.0)
        second = solve_homogeneous(two_jump_d, SecondOrderProblem(P=-(x + z), Q=x * z, x0=1.0, v0=x + 1.0))
        for t in (0.4, 1.0, 1.9):
            assert abs(sol(t) - second(t)) < 1e-10

    def test_split_into_continuous_and_jump_parts(self, two_jump_d):
        d, beta, f = two_jump_d, 0.6, math.cos

        def v_c(s):
            return math.exp(beta * d.continuous_part(s))

        def v_b(s):
            return math.prod(1 + beta * delta for t_k, delta in d.jumps if t_k < s)

        t = 1.8
        tilde_c = v_c(t) * (0.5 + continuous_integral(d, lambda s: f(s) / (v_c(s) * v_b(s)), 0.0, t))
        jump_terms = sum(
            f(t_k) * delta / (v_b(t_k) * v_c(t_k) * (1 + beta * delta)) for t_k, delta in d.jumps if t_k < t
        )
        tilde_b = v_b(t) * (0.5 + jump_terms)
        sol = solve_first_order(d, beta, f=f, v0=1.0)
        assert abs(sol(t) - (v_c(t) * tilde_b + v_b(t) * tilde_c)) < 1e-10
