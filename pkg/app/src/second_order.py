"""
Second-order linear Stieltjes problems with constant coefficients.

PURPOSE:
Closed-form solutions of

    v''_g(t) + P v'_g(t) + Q v(t) = f(t),   v(0) = x0,   v'_g(0) = v0

built from the g-exponentials of the characteristic roots
lambda_{1,2} = (-P +- sqrt(P^2 - 4Q)) / 2.

WHAT IT DOES:
1. solve_homogeneous / solve_nonhomogeneous: single-integral production formulas
2. green_second_order: Green kernels for distinct and double roots
3. nested_solution: the nested double-integral form, kept as a cross-check
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

from .derivator import Derivator
from .errors import DomainError
from .first_order import GExpResult, GreenKernel, g_exp
from .stieltjes_integral import (
    DEFAULT_QUADRATURE,
    QuadratureSettings,
    jump_weighted_measure,
    ls_integral,
)
from .trajectory import Trajectory, sample

logger = logging.getLogger(__name__)

_MODULE = "second_order"

# Roots closer than this (relative to 1 + |lambda_1|) use the double-root formulas.
DEGENERACY_RTOL = 1e-8

Number = Union[int, float, complex]
Source = Callable[[float], complex]


@dataclass(frozen=True)
class SecondOrderProblem:
    P: complex
    Q: complex
    x0: complex = 1.0
    v0: complex = 0.0
    f: Optional[Source] = field(default=None, compare=False)
    horizon: Optional[float] = None

    def without_source(self) -> "SecondOrderProblem":
        return SecondOrderProblem(self.P, self.Q, self.x0, self.v0, None, self.horizon)


def characteristic_roots(P: Number, Q: Number) -> Tuple[complex, complex]:
    """Roots of lambda^2 + P lambda + Q = 0, computed in complex arithmetic."""
    P, Q = complex(P), complex(Q)
    disc = cmath.sqrt(P * P - 4 * Q)
    return (-P + disc) / 2, (-P - disc) / 2


def validate_roots(d: Derivator, roots: Tuple[complex, ...]) -> None:
    """Every root must keep 1 + lambda Delta+g(t_k) away from zero at every jump."""
    for lam in roots:
        for t_k, delta in d.jumps:
            factor = 1 + lam * delta
            if abs(factor) <= 1e-14 * max(1.0, abs(lam * delta)):
                raise DomainError(
                    f"1 + lambda*Delta vanishes at t={t_k} for lambda={lam}", _MODULE
                )


def _is_double(lam1: complex, lam2: complex) -> bool:
    return abs(lam1 - lam2) < DEGENERACY_RTOL * (1 + abs(lam1))


@dataclass(frozen=True)
class SecondOrderSolution:
    """
    Callable solution; also exposes the exact g-derivative and right limits.

    Distinct roots use exp_g(lambda_1) and exp_g(lambda_2); a double root uses
    exp_g(lambda) and H(t) = int_[0,t) 1 / (1 + lambda Delta) dmu_g.
    """

    derivator: Derivator
    problem: SecondOrderProblem
    lam1: complex
    lam2: complex
    double: bool
    e1: GExpResult
    e2: Optional[GExpResult]
    quadrature: QuadratureSettings = DEFAULT_QUADRATURE

    # ---------- building blocks ----------
    def _h(self, t: float) -> complex:
        lam = self.lam1
        return jump_weighted_measure(self.derivator, lambda delta: 1 / (1 + lam * delta), t)

    def _weighted_integral(self, e: GExpResult, lam: complex, t: float) -> complex:
        """int_[0,t) exp_g(lambda; 0, s)^-1 f(s) / (1 + lambda Delta(s)) dmu_g."""
        d, f = self.derivator, self.problem.f

        def integrand(s: float) -> complex:
            return e.inverse(s) * complex(f(s)) / (1 + lam * d.jump_at(s))

        return ls_integral(d, integrand, t, self.quadrature)

    # ---------- homogeneous part ----------
    def homogeneous(self, t: float) -> complex:
        x0, v0 = complex(self.problem.x0), complex(self.problem.v0)
        if self.double:
            lam, e = self.lam1, self.e1(t)
            return x0 * e + (v0 - lam * x0) * e * self._h(t)
        l1, l2 = self.lam1, self.lam2
        c1 = (v0 - l2 * x0) / (l1 - l2)
        c2 = (v0 - l1 * x0) / (l1 - l2)
        return c1 * self.e1(t) - c2 * self.e2(t)

    def homogeneous_derivative(self, t: float) -> complex:
        x0, v0 = complex(self.problem.x0), complex(self.problem.v0)
        if self.double:
            lam, e = self.lam1, self.e1(t)
            return lam * x0 * e + (v0 - lam * x0) * (lam * e * self._h(t) + e)
        l1, l2 = self.lam1, self.lam2
        c1 = (v0 - l2 * x0) / (l1 - l2)
        c2 = (v0 - l1 * x0) / (l1 - l2)
        return c1 * l1 * self.e1(t) - c2 * l2 * self.e2(t)

    # ---------- particular part ----------
    def _particular_pair(self, t: float) -> Tuple[complex, complex]:
        """(v_p(t), (v_p)'_g(t)); both vanish at t = 0."""
        if self.problem.f is None:
            return 0j, 0j
        if not self.double:
            l1, l2 = self.lam1, self.lam2
            a1 = self.e1(t) * self._weighted_integral(self.e1, l1, t)
            a2 = self.e2(t) * self._weighted_integral(self.e2, l2, t)
            return (a1 - a2) / (l1 - l2), (l1 * a1 - l2 * a2) / (l1 - l2)

        d, f, lam, e = self.derivator, self.problem.f, self.lam1, self.e1
        h_t = self._h(t)

        def integrand(s: float) -> complex:
            delta = d.jump_at(s)
            w = e.inverse(s) * complex(f(s)) / (1 + lam * delta)
            return w * (h_t - self._h(s) - delta / (1 + lam * delta))

        e_t = e(t)
        vp = e_t * ls_integral(d, integrand, t, self.quadrature)
        return vp, lam * vp + e_t * self._weighted_integral(e, lam, t)

    def particular(self, t: float) -> complex:
        return self._particular_pair(t)[0]

    # ---------- full solution ----------
    def __call__(self, t: float) -> complex:
        return self.homogeneous(t) + self.particular(t)

    def derivative(self, t: float) -> complex:
        """Exact v'_g(t)."""
        return self.homogeneous_derivative(t) + self._particular_pair(t)[1]

    def value_right(self, t: float) -> complex:
        """v(t+) = v(t) + v'_g(t) Delta+g(t)."""
        delta = self.derivator.jump_at(t)
        if delta == 0:
            return self(t)
        return self(t) + self.derivative(t) * delta

    def derivative_right(self, t: float) -> complex:
        """v'_g(t+) = v'_g(t) + v''_g(t) Delta+g(t) with v'' = f - P v' - Q v."""
        delta = self.derivator.jump_at(t)
        dv = self.derivative(t)
        if delta == 0:
            return dv
        prob = self.problem
        f_t = complex(prob.f(t)) if prob.f is not None else 0j
        d2v = f_t - complex(prob.P) * dv - complex(prob.Q) * self(t)
        return dv + d2v * delta

    def trajectory(self, n_points: int = 401) -> Trajectory:
        return sample(self.derivator, self, n_points, right=self.value_right)


def _build(d: Derivator, prob: SecondOrderProblem, q: QuadratureSettings) -> SecondOrderSolution:
    if prob.horizon is not None and float(prob.horizon) != d.T:
        raise DomainError(f"problem horizon {prob.horizon} differs from derivator T={d.T}", _MODULE)
    lam1, lam2 = characteristic_roots(prob.P, prob.Q)
    double = _is_double(lam1, lam2)
    if double:
        lam1 = lam2 = -complex(prob.P) / 2
        logger.debug("double root lambda=%s", lam1)
    validate_roots(d, (lam1, lam2))
    e1 = g_exp(d, lam1, q=q)
    e2 = None if double else g_exp(d, lam2, q=q)
    return SecondOrderSolution(d, prob, lam1, lam2, double, e1, e2, q)


def solve_homogeneous(
    d: Derivator,
    prob: SecondOrderProblem,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> SecondOrderSolution:
    """
    v'' + P v' + Q v = 0 with v(0) = x0, v'(0) = v0.

    Raises:
        DomainError: the problem carries a source, or a root annihilates a jump factor
    """
    if prob.f is not None:
        raise DomainError("solve_homogeneous expects a problem without source", _MODULE)
    return _build(d, prob, q)


def solve_nonhomogeneous(
    d: Derivator,
    prob: SecondOrderProblem,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> SecondOrderSolution:
    """Homogeneous part plus the particular solution with v_p(0) = (v_p)'(0) = 0."""
    return _build(d, prob, q)


def green_second_order(
    d: Derivator,
    P: Number,
    Q: Number,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> GreenKernel:
    """
    G(t, r) for r < t.

    Distinct roots:
        (l1 - l2)^-1 [E1(t) E1(r)^-1 / (1 + l1 Delta(r)) - E2(t) E2(r)^-1 / (1 + l2 Delta(r))]
    Double root:
        E(t) E(r)^-1 / (1 + l Delta(r)) [H(t) - H(r) - Delta(r) / (1 + l Delta(r))]
    """
    lam1, lam2 = characteristic_roots(P, Q)
    if _is_double(lam1, lam2):
        lam = -complex(P) / 2
        validate_roots(d, (lam,))
        e = g_exp(d, lam, q=q)

        def h(t: float) -> complex:
            return jump_weighted_measure(d, lambda delta: 1 / (1 + lam * delta), t)

        def kernel(t: float, r: float) -> complex:
            delta = d.jump_at(r)
            base = e.unit(t) * e.inverse(r) / (1 + lam * delta)
            return base * (h(t) - h(r) - delta / (1 + lam * delta))

        return GreenKernel(derivator=d, kernel=kernel, quadrature=q)

    validate_roots(d, (lam1, lam2))
    e1, e2 = g_exp(d, lam1, q=q), g_exp(d, lam2, q=q)

    def kernel(t: float, r: float) -> complex:
        delta = d.jump_at(r)
        k1 = e1.unit(t) * e1.inverse(r) / (1 + lam1 * delta)
        k2 = e2.unit(t) * e2.inverse(r) / (1 + lam2 * delta)
        return (k1 - k2) / (lam1 - lam2)

    return GreenKernel(derivator=d, kernel=kernel, quadrature=q)


def nested_solution(
    d: Derivator,
    prob: SecondOrderProblem,
    t: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> complex:
    """
    Nested double-integral form of the solution, reducing the problem to two
    first-order ones. Quadratic in the number of quadrature nodes; used to
    cross-check the single-integral formulas.
    """
    lam1, lam2 = characteristic_roots(prob.P, prob.Q)
    validate_roots(d, (lam1, lam2))
    e1, e2 = g_exp(d, lam1, q=q), g_exp(d, lam2, q=q)
    x0, v0, f = complex(prob.x0), complex(prob.v0), prob.f

    def inner(s: float) -> complex:
        if f is None:
            return 0j
        return ls_integral(
            d, lambda r: e1.inverse(r) * complex(f(r)) / (1 + lam1 * d.jump_at(r)), s, q
        )

    def outer(s: float) -> complex:
        weight = e2.inverse(s) / (1 + lam2 * d.jump_at(s)) * e1.unit(s)
        return weight * ((v0 - lam2 * x0) + inner(s))

    e2_t = e2.unit(t)
    return x0 * e2_t + e2_t * ls_integral(d, outer, t, q)
