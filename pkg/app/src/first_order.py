"""
First-order linear Stieltjes problems.

PURPOSE:
Closed-form solutions of

    v'_g(t) = beta(t) v(t) + f(t),   v(0) = v0

on a derivator window [0, T]:
  - g_exp:             homogeneous case, the g-exponential exp_g(beta; 0, t)
  - g_sin_cos:         g-sine / g-cosine as Im / Re of exp_g(i b; 0, t)
  - solve_first_order: variation-of-constants formula
  - green_first_order: the kernel G(t, s) of the particular part

The g-exponential is the product of the jump factors (1 + beta(t_k) Delta_k)
over t_k < t times exp(int_[0,t) beta dmu_{g^C}). Products are taken
directly, so zero and negative factors need no logarithm branch handling.
"""

from __future__ import annotations

import bisect
import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .derivator import Derivator, JumpSet
from .errors import DomainError, TruncationError
from .stieltjes_integral import (
    DEFAULT_QUADRATURE,
    QuadratureSettings,
    continuous_integral,
    ls_integral,
)
from .trajectory import Trajectory, sample

logger = logging.getLogger(__name__)

_MODULE = "first_order"

# A jump factor below this (relative to |beta * Delta|) is treated as an exact zero.
TRUNCATION_RTOL = 1e-14
# Factors below this are kept but reported as badly conditioned.
CONDITIONING_RTOL = 1e-10

Number = Union[int, float, complex]


# ============================================================
# COEFFICIENTS
# ============================================================

@dataclass(frozen=True)
class Coefficient:
    """
    A coefficient beta(t).

    `const` is the value of beta off the jump set when that value is constant;
    it lets the continuous exponent be computed exactly as const * g^C(t).
    Jump factors always use func(t_k).
    """

    func: Callable[[float], complex]
    const: Optional[complex] = None

    def __call__(self, t: float) -> complex:
        return complex(self.func(t))

    @classmethod
    def constant(cls, value: Number) -> "Coefficient":
        c = complex(value)
        return cls(func=lambda t: c, const=c)

    @classmethod
    def of(cls, value: Union["Coefficient", Callable[[float], complex], Number]) -> "Coefficient":
        if isinstance(value, Coefficient):
            return value
        if callable(value):
            return cls(func=value)
        return cls.constant(value)

    def scaled(self, factor: Number) -> "Coefficient":
        k = complex(factor)
        func = self.func
        const = None if self.const is None else k * self.const
        return Coefficient(func=lambda t: k * complex(func(t)), const=const)

    def conjugate(self) -> "Coefficient":
        func = self.func
        const = None if self.const is None else self.const.conjugate()
        return Coefficient(func=lambda t: complex(func(t)).conjugate(), const=const)

    @property
    def is_real(self) -> bool:
        return self.const is not None and self.const.imag == 0


def modulated_coefficient(d: Derivator, a: Number, b: Number) -> Coefficient:
    """b / (1 + a Delta+g(t)); equals b off the jump set."""
    a, b = complex(a), complex(b)
    return Coefficient(func=lambda t: b / (1 + a * d.jump_at(t)), const=b)


def product_coefficient(d: Derivator, beta1: Coefficient, beta2: Coefficient) -> Coefficient:
    """beta1 + beta2 + beta1 beta2 Delta+g, so that exp_g(beta1) exp_g(beta2) = exp_g(result)."""
    def func(t: float) -> complex:
        b1, b2 = beta1(t), beta2(t)
        return b1 + b2 + b1 * b2 * d.jump_at(t)

    const = None
    if beta1.const is not None and beta2.const is not None:
        const = beta1.const + beta2.const
    return Coefficient(func=func, const=const)


def inverse_coefficient(d: Derivator, beta: Coefficient) -> Coefficient:
    """-beta / (1 + beta Delta+g), the coefficient of 1 / exp_g(beta)."""
    def func(t: float) -> complex:
        b = beta(t)
        factor = 1 + b * d.jump_at(t)
        if factor == 0:
            raise TruncationError(f"1 / exp_g is undefined from t0={t} on", t0=t, module=_MODULE)
        return -b / factor

    const = None if beta.const is None else -beta.const
    return Coefficient(func=func, const=const)


def power_coefficient(d: Derivator, beta: Coefficient, n: int) -> Coefficient:
    """p_n(beta) = n beta + sum_{k=2}^n C(n,k) beta^k Delta^(k-1), so exp_g(beta)^n = exp_g(p_n)."""
    if n < 1:
        raise DomainError(f"power must be >= 1, got {n}", _MODULE)

    def func(t: float) -> complex:
        b, delta = beta(t), d.jump_at(t)
        total = n * b
        for k in range(2, n + 1):
            total += math.comb(n, k) * b ** k * delta ** (k - 1)
        return total

    const = None if beta.const is None else n * beta.const
    return Coefficient(func=func, const=const)


def negative_power_coefficient(d: Derivator, beta: Coefficient, n: int) -> Coefficient:
    """q_n(beta) = -p_n / (1 + p_n Delta), so exp_g(beta)^(-n) = exp_g(q_n)."""
    return inverse_coefficient(d, power_coefficient(d, beta, n))


# ============================================================
# G-EXPONENTIAL
# ============================================================

@dataclass(frozen=True)
class GExpResult:
    """v0 * exp_g(beta; 0, t), evaluated lazily per query time."""

    derivator: Derivator
    beta: Coefficient
    v0: complex
    jump_factors: Tuple[Tuple[float, complex], ...]
    truncation: float
    truncated: bool
    quadrature: QuadratureSettings = DEFAULT_QUADRATURE
    _prefix: Tuple[complex, ...] = field(default=(), repr=False)
    _anchors: Tuple[Tuple[float, complex], ...] = field(default=(), repr=False)

    def _exponent(self, t: float) -> complex:
        """int_[0,t) beta dmu_{g^C}."""
        d = self.derivator
        if self.beta.const is not None:
            return self.beta.const * d.continuous_part(t)
        times = [a for a, _ in self._anchors]
        i = max(bisect.bisect_right(times, t) - 1, 0)
        t_anchor, base = self._anchors[i]
        return base + continuous_integral(d, self.beta, t_anchor, t, self.quadrature)

    def unit(self, t: float) -> complex:
        """exp_g(beta; 0, t) without the initial value."""
        d = self.derivator
        d.continuous_part(t)
        if self.truncated and t > self.truncation:
            return 0j
        return self._prefix[d.jumps.count_before(t)] * cmath.exp(self._exponent(t))

    def value(self, t: float) -> complex:
        return self.v0 * self.unit(t)

    __call__ = value

    def factor_at(self, t: float) -> complex:
        """1 + beta(t) Delta+g(t); 1 off the jump set."""
        i = bisect.bisect_left(self.derivator.jumps.times, t)
        jumps = self.derivator.jumps
        if i < len(jumps.times) and jumps.times[i] == t:
            return self.jump_factors[i][1]
        return 1 + 0j

    def value_right(self, t: float) -> complex:
        """v(t+) = (1 + beta(t) Delta+g(t)) v(t)."""
        return self.value(t) * self.factor_at(t)

    def inverse(self, s: float) -> complex:
        """exp_g(beta; 0, s)^-1, defined up to the truncation time."""
        if self.truncated and s > self.truncation:
            raise TruncationError(
                f"exp_g is not invertible past t0={self.truncation} (queried s={s})",
                t0=self.truncation,
                module=_MODULE,
            )
        return 1.0 / self.unit(s)


def g_exp(
    d: Derivator,
    beta: Union[Coefficient, Number, Callable[[float], complex]],
    v0: Number = 1.0,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> GExpResult:
    """
    Solve v'_g = beta v, v(0) = v0.

    The solution vanishes identically after the first jump t0 where
    1 + beta(t0) Delta+g(t0) = 0; t0 is T when no factor vanishes.
    """
    beta = Coefficient.of(beta)
    factors: List[Tuple[float, complex]] = []
    truncation, truncated = d.T, False
    for t_k, delta in d.jumps:
        step = beta(t_k) * delta
        factor = 1 + step
        scale = max(1.0, abs(step))
        if abs(factor) <= TRUNCATION_RTOL * scale:
            factor = 0j
            if not truncated:
                truncation, truncated = t_k, True
                logger.debug("exp_g truncated at t0=%s (factor vanishes)", t_k)
        elif abs(factor) < CONDITIONING_RTOL * scale:
            logger.warning("jump factor at t=%s is nearly zero (|1+beta*Delta|=%.3g)", t_k, abs(factor))
        factors.append((t_k, factor))

    prefix = tuple(
        np.concatenate(([1 + 0j], np.cumprod([f for _, f in factors], dtype=complex))).tolist()
    )

    anchors: Tuple[Tuple[float, complex], ...] = ()
    if beta.const is None:
        bps = d.breakpoints()
        acc = [(bps[0], 0j)]
        for lo, hi in zip(bps[:-1], bps[1:]):
            acc.append((hi, acc[-1][1] + continuous_integral(d, beta, lo, hi, q)))
        anchors = tuple(acc)

    return GExpResult(
        derivator=d,
        beta=beta,
        v0=complex(v0),
        jump_factors=tuple(factors),
        truncation=truncation,
        truncated=truncated,
        quadrature=q,
        _prefix=prefix,
        _anchors=anchors,
    )


def real_case_exp(d: Derivator, beta: float, t: float) -> float:
    """
    Real-coefficient form |prod(1 + beta Delta_k)| exp(beta g^C(t)) cos(j pi),
    with j the number of negative factors before t.
    """
    modulus, negatives = 1.0, 0
    for t_k, delta in d.jumps:
        if t_k >= t:
            break
        factor = 1 + beta * delta
        if factor == 0:
            return 0.0
        modulus *= abs(factor)
        negatives += factor < 0
    return modulus * math.exp(beta * d.continuous_part(t)) * math.cos(negatives * math.pi)


def _jumps_before(d: Derivator, t0: float) -> Derivator:
    """d with the jumps at t0 and later removed; equal to d on [0, t0]."""
    k = d.jumps.count_before(t0)
    jumps = JumpSet(d.jumps.times[:k], d.jumps.sizes[:k])
    return Derivator(d.cont, jumps, strict_window=False)


def g_exp_properties_check(
    d: Derivator,
    beta: Union[Coefficient, Number],
    n: int = 2,
    other: Optional[Union[Coefficient, Number]] = None,
    times: Optional[Sequence[float]] = None,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> Dict[str, float]:
    """
    Check the algebra of the g-exponential at sampled times.

    Returns a dict of maximal relative deviations for:
      - conjugation:   conj(exp_g(beta)) = exp_g(conj beta)
      - power:         exp_g(beta)^n = exp_g(p_n(beta))
      - negative_power: exp_g(beta)^-n = exp_g(q_n(beta))
      - product:       exp_g(beta) exp_g(other) = exp_g(beta + other + beta other Delta)
      - inverse:       exp_g(beta) exp_g(-beta / (1 + beta Delta)) = 1
    plus max_deviation over all of them.
    """
    if n < 2:
        raise DomainError(f"power check needs n >= 2, got {n}", _MODULE)
    beta = Coefficient.of(beta)
    other = beta.conjugate() if other is None else Coefficient.of(other)

    e = g_exp(d, beta, q=q)
    if times is None:
        end = e.truncation
        times = sorted(set(np.linspace(0.0, end, 21).tolist()) | {t for t in d.jumps.times if t <= end})
    times = list(times)
    for s in times:
        if e.truncated and s > e.truncation:
            raise TruncationError(f"sample time {s} lies past t0={e.truncation}", e.truncation, _MODULE)

    # Inverses only exist before t0; samples stop at t0, so later jumps are never reached.
    head = _jumps_before(d, e.truncation) if e.truncated else d

    e_conj = g_exp(d, beta.conjugate(), q=q)
    e_pow = g_exp(d, power_coefficient(d, beta, n), q=q)
    e_neg = g_exp(head, negative_power_coefficient(head, beta, n), q=q)
    e_other = g_exp(d, other, q=q)
    e_prod = g_exp(d, product_coefficient(d, beta, other), q=q)
    e_inv = g_exp(head, inverse_coefficient(head, beta), q=q)

    def rel(lhs: complex, rhs: complex) -> float:
        return abs(lhs - rhs) / max(1.0, abs(rhs))

    report = {"conjugation": 0.0, "power": 0.0, "negative_power": 0.0, "product": 0.0, "inverse": 0.0}
    for s in times:
        v = e(s)
        report["conjugation"] = max(report["conjugation"], rel(v.conjugate(), e_conj(s)))
        report["power"] = max(report["power"], rel(v ** n, e_pow(s)))
        report["negative_power"] = max(report["negative_power"], rel(e.inverse(s) ** n, e_neg(s)))
        report["product"] = max(report["product"], rel(v * e_other(s), e_prod(s)))
        report["inverse"] = max(report["inverse"], rel(v * e_inv(s), 1.0))
    report["max_deviation"] = max(report.values())
    logger.debug("exp_g property deviations: %s", report)
    return report


# ============================================================
# G-SINE / G-COSINE
# ============================================================

@dataclass(frozen=True)
class GSinCos:
    """sin_g(b; 0, t) and cos_g(b; 0, t) as Im / Re of exp_g(i b; 0, t)."""

    exp: GExpResult

    def sin(self, t: float) -> float:
        return self.exp(t).imag

    def cos(self, t: float) -> float:
        return self.exp(t).real

    def sin_right(self, t: float) -> float:
        return self.exp.value_right(t).imag

    def cos_right(self, t: float) -> float:
        return self.exp.value_right(t).real

    def trajectories(self, n_points: int = 401) -> Tuple[Trajectory, Trajectory]:
        d = self.exp.derivator
        return (
            sample(d, self.sin, n_points, right=self.sin_right),
            sample(d, self.cos, n_points, right=self.cos_right),
        )


def g_sin_cos(
    d: Derivator,
    b: Union[Coefficient, Number, Callable[[float], float]],
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> GSinCos:
    b = Coefficient.of(b)
    if b.const is not None and b.const.imag != 0:
        raise DomainError(f"g-sine/g-cosine need a real coefficient, got {b.const}", _MODULE)
    for t in sorted(set(d.jumps.times) | set(d.breakpoints())):
        if b(t).imag != 0:
            raise DomainError(f"g-sine/g-cosine need a real coefficient, got b({t}) = {b(t)}", _MODULE)
    return GSinCos(exp=g_exp(d, b.scaled(1j), q=q))


def g_sin_cos_explicit(d: Derivator, b: float, t: float) -> Tuple[float, float]:
    """
    (sin_g, cos_g) for constant real b in modulus/argument form:
    modulus prod sqrt(1 + b^2 Delta_k^2), argument b g^C(t) + sum atan(b Delta_k).
    """
    modulus, argument = 1.0, b * d.continuous_part(t)
    for t_k, delta in d.jumps:
        if t_k >= t:
            break
        modulus *= math.sqrt(1.0 + (b * delta) ** 2)
        argument += math.atan(b * delta)
    return modulus * math.sin(argument), modulus * math.cos(argument)


# ============================================================
# NON-HOMOGENEOUS PROBLEM AND GREEN KERNEL
# ============================================================

@dataclass(frozen=True)
class GreenKernel:
    """G(t, r) with support r < t; convolve() integrates it against a source."""

    derivator: Derivator
    kernel: Callable[[float, float], complex] = field(repr=False)
    quadrature: QuadratureSettings = DEFAULT_QUADRATURE

    def __call__(self, t: float, r: float) -> complex:
        if r >= t:
            return 0j
        return complex(self.kernel(t, r))

    def convolve(self, f: Callable[[float], complex], t: float) -> complex:
        """int_[0,t) G(t, r) f(r) dmu_g(r)."""
        return ls_integral(self.derivator, lambda r: self(t, r) * complex(f(r)), t, self.quadrature)


def _as_source(f: Optional[Union[Callable[[float], complex], Number]]) -> Optional[Callable[[float], complex]]:
    if f is None or callable(f):
        return f
    c = complex(f)
    return lambda t: c


@dataclass(frozen=True)
class FirstOrderSolution:
    """v(t) = v0 exp_g(beta; 0, t) + exp_g(beta; 0, t) int_[0,t) exp_g(beta; 0, s)^-1 f(s) / (1 + beta Delta) dmu_g."""

    exp: GExpResult
    source: Optional[Callable[[float], complex]]
    v0: complex

    @property
    def derivator(self) -> Derivator:
        return self.exp.derivator

    def _check(self, t: float) -> None:
        e = self.exp
        if e.truncated and t > e.truncation:
            raise TruncationError(
                f"solution is only defined on [0, t0] with t0={e.truncation} (queried t={t})",
                t0=e.truncation,
                module=_MODULE,
            )

    def particular(self, t: float) -> complex:
        self._check(t)
        if self.source is None:
            return 0j
        d, e, f = self.derivator, self.exp, self.source
        beta = e.beta

        def integrand(s: float) -> complex:
            return complex(f(s)) * e.inverse(s) / (1 + beta(s) * d.jump_at(s))

        return e.unit(t) * ls_integral(d, integrand, t, e.quadrature)

    def __call__(self, t: float) -> complex:
        self._check(t)
        return self.v0 * self.exp.unit(t) + self.particular(t)

    def value_right(self, t: float) -> complex:
        """v(t+) = v(t) + (beta(t) v(t) + f(t)) Delta+g(t)."""
        v = self(t)
        delta = self.derivator.jump_at(t)
        if delta == 0:
            return v
        f_t = complex(self.source(t)) if self.source is not None else 0j
        return v + (self.exp.beta(t) * v + f_t) * delta

    def trajectory(self, n_points: int = 401) -> Trajectory:
        # Past t0 the solution is undefined; those rows are NaN.
        end = self.exp.truncation if self.exp.truncated else self.derivator.T
        nan = complex("nan")
        return sample(
            self.derivator,
            lambda t: self(t) if t <= end else nan,
            n_points,
            right=lambda t: self.value_right(t) if t <= end else nan,
        )


def solve_first_order(
    d: Derivator,
    beta: Union[Coefficient, Number, Callable[[float], complex]],
    f: Optional[Union[Callable[[float], complex], Number]] = None,
    v0: Number = 1.0,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> FirstOrderSolution:
    """
    Solve v'_g = beta v + f, v(0) = v0 by variation of constants.

    Raises:
        TruncationError: when the returned solution is queried past t0
    """
    return FirstOrderSolution(exp=g_exp(d, beta, q=q), source=_as_source(f), v0=complex(v0))


def green_first_order(
    d: Derivator,
    beta: Union[Coefficient, Number, Callable[[float], complex]],
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> GreenKernel:
    """G(t, s) = exp_g(beta; 0, t) exp_g(beta; 0, s)^-1 / (1 + beta(s) Delta+g(s)) for s < t."""
    e = g_exp(d, beta, q=q)

    def kernel(t: float, s: float) -> complex:
        if e.truncated and t > e.truncation:
            raise TruncationError(f"kernel queried past t0={e.truncation}", e.truncation, _MODULE)
        return e.unit(t) * e.inverse(s) / (1 + e.beta(s) * d.jump_at(s))

    return GreenKernel(derivator=d, kernel=kernel, quadrature=q)
