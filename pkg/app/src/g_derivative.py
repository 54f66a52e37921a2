"""
Numerical g-derivative (Stieltjes derivative) operator.

The derivative depends on the class of the point:
  - jump t_k:          exact quotient (f(t_k+) - f(t_k)) / Delta+g(t_k)
  - flat interior:     the derivative at the right end b_n of the flat component
  - flat right end:    one-sided forward quotient
  - flat left end:     one-sided backward quotient
  - regular point:     symmetric quotient (f(t+h) - f(t-h)) / (g(t+h) - g(t-h))

Quotients are extrapolated with Richardson over a decreasing step sequence.
Steps are shrunk so that they never cross a breakpoint of g.
"""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

from .derivator import Derivator, PointClass
from .errors import DegeneratePointError, DomainError

logger = logging.getLogger(__name__)

_MODULE = "g_derivative"

# Smallest usable g-difference.
_MIN_DENOMINATOR = 1e-300

Func = Callable[[float], complex]


def right_offset(d: Derivator) -> float:
    """epsilon_0 used to realize right limits t+ as t + epsilon_0."""
    return 1e-9 * max(1.0, d.T)


@dataclass(frozen=True)
class GDiffSettings:
    """Steps are multiplied by T when `relative` is set."""

    step_sequence: Tuple[float, ...] = (1e-3, 5e-4, 2.5e-4)
    richardson: bool = True
    relative: bool = True

    def __post_init__(self) -> None:
        steps = self.step_sequence
        if not steps or any(h <= 0 for h in steps):
            raise DomainError(f"steps must be positive, got {steps}", _MODULE)
        if any(b >= a for a, b in zip(steps, steps[1:])):
            raise DomainError(f"steps must be strictly decreasing, got {steps}", _MODULE)

    def steps_for(self, d: Derivator) -> List[float]:
        scale = d.T if self.relative else 1.0
        return [h * scale for h in self.step_sequence]


DEFAULT_GDIFF = GDiffSettings()


def richardson(steps: Sequence[float], values: Sequence[complex], orders: Sequence[int]) -> complex:
    """
    Neville-style Richardson tableau for a quotient with error expansion
    c_1 h^orders[0] + c_2 h^orders[1] + ...
    """
    table = list(values)
    for level, p in enumerate(orders, start=1):
        if len(table) < 2:
            break
        refined = []
        for i in range(len(table) - 1):
            r = (steps[i] / steps[i + level]) ** p
            refined.append((r * table[i + 1] - table[i]) / (r - 1))
        table = refined
    return table[-1]


# ============================================================
# QUOTIENTS
# ============================================================

def _right_value(d: Derivator, f: Func, t: float, right: Optional[Func]) -> complex:
    if right is not None:
        return complex(right(t))
    value_right = getattr(f, "value_right", None)
    if callable(value_right):
        return complex(value_right(t))
    return complex(f(t + right_offset(d)))


def _rooms(d: Derivator, t: float) -> Tuple[float, float]:
    bps = d.breakpoints()
    i = bisect.bisect_right(bps, t)
    right_room = bps[i] - t if i < len(bps) else 0.0
    j = bisect.bisect_left(bps, t) - 1
    left_room = t - bps[j] if j >= 0 else 0.0
    return left_room, right_room


def _fit_steps(steps: List[float], room: float) -> List[float]:
    if room >= steps[0]:
        return steps
    scale = 0.5 * room / steps[0]
    return [h * scale for h in steps]


def _extrapolate(
    d: Derivator,
    t: float,
    steps: List[float],
    quotient: Callable[[float], Optional[complex]],
    orders: Tuple[int, ...],
    s: GDiffSettings,
) -> complex:
    used_steps, values = [], []
    for h in steps:
        q = quotient(h)
        if q is not None:
            used_steps.append(h)
            values.append(q)
    if not values:
        raise DegeneratePointError(f"g-difference vanishes for every step at t={t}", t, _MODULE)
    if not s.richardson or len(values) == 1:
        return values[-1]
    return richardson(used_steps, values, orders)


def _forward(d: Derivator, f: Func, t: float, base: complex, g_base: float, s: GDiffSettings) -> complex:
    _, room = _rooms(d, t)
    steps = _fit_steps(s.steps_for(d), room)

    def quotient(h: float) -> Optional[complex]:
        den = d.eval(t + h) - g_base
        if abs(den) < _MIN_DENOMINATOR:
            return None
        return (complex(f(t + h)) - base) / den

    return _extrapolate(d, t, steps, quotient, (1, 2), s)


def _backward(d: Derivator, f: Func, t: float, s: GDiffSettings) -> complex:
    room, _ = _rooms(d, t)
    steps = _fit_steps(s.steps_for(d), room)
    f_t, g_t = complex(f(t)), d.eval(t)

    def quotient(h: float) -> Optional[complex]:
        den = g_t - d.eval(t - h)
        if abs(den) < _MIN_DENOMINATOR:
            return None
        return (f_t - complex(f(t - h))) / den

    return _extrapolate(d, t, steps, quotient, (1, 2), s)


def _symmetric(d: Derivator, f: Func, t: float, steps: List[float], s: GDiffSettings) -> complex:
    def quotient(h: float) -> Optional[complex]:
        den = d.eval(t + h) - d.eval(t - h)
        if abs(den) < _MIN_DENOMINATOR:
            return None
        return (complex(f(t + h)) - complex(f(t - h))) / den

    return _extrapolate(d, t, steps, quotient, (2, 4), s)


def _regular(d: Derivator, f: Func, t: float, s: GDiffSettings) -> complex:
    steps = s.steps_for(d)
    left_room, right_room = _rooms(d, t)
    if min(left_room, right_room) >= steps[0]:
        return _symmetric(d, f, t, steps, s)
    if right_room >= left_room:
        return _forward(d, f, t, complex(f(t)), d.eval(t), s)
    return _backward(d, f, t, s)


def _from_right(d: Derivator, f: Func, t: float, s: GDiffSettings, right: Optional[Func]) -> complex:
    """lim_{u -> t+} (f(u) - f(t)) / (g(u) - g(t)), exact at jumps."""
    delta = d.jump_at(t)
    if delta > 0:
        return (_right_value(d, f, t, right) - complex(f(t))) / delta
    return _forward(d, f, t, complex(f(t)), d.eval(t), s)


# ============================================================
# PUBLIC OPERATORS
# ============================================================

def g_derivative_at(
    d: Derivator,
    f: Func,
    t: float,
    s: GDiffSettings = DEFAULT_GDIFF,
    right: Optional[Func] = None,
) -> complex:
    """
    f'_g(t) for every class of point.

    Args:
        d: derivator
        f: function to differentiate
        t: point in [0, T]
        s: step sequence and extrapolation flag
        right: right-limit evaluator f(t+) at jumps; falls back to
               f.value_right when present, then to f(t + epsilon_0)

    Raises:
        DegeneratePointError: every g-difference vanished
    """
    point = d.classify(t)
    if point is PointClass.JUMP or point is PointClass.FLAT_RIGHT_END:
        return _from_right(d, f, t, s, right)
    if point is PointClass.FLAT_INTERIOR:
        _, b = d.flat_component_at(t)
        return _from_right(d, f, b, s, right)
    if point is PointClass.FLAT_LEFT_END:
        return _backward(d, f, t, s)
    if t == 0.0:
        return _forward(d, f, t, complex(f(t)), d.eval(t), s)
    if t == d.T:
        return _backward(d, f, t, s)
    return _regular(d, f, t, s)


def g_derivative_right(
    d: Derivator,
    f: Func,
    t: float,
    s: GDiffSettings = DEFAULT_GDIFF,
    right: Optional[Func] = None,
) -> complex:
    """
    f'_g(t+), the g-derivative just after t.

    At a jump this is the forward quotient based at f(t+) and g(t+); elsewhere
    it coincides with g_derivative_at.
    """
    if d.jump_at(t) == 0:
        return g_derivative_at(d, f, t, s, right)
    base = _right_value(d, f, t, right)
    return _forward(d, f, t, base, d.eval_right(t), s)


def _as_func(value: Union[Callable[[float], complex], complex, float, None]) -> Func:
    if value is None:
        return lambda t: 0j
    if callable(value):
        return value
    c = complex(value)
    return lambda t: c


def residual(
    d: Derivator,
    v: Func,
    coeffs: Sequence[Union[Callable[[float], complex], complex, float]],
    rhs: Optional[Union[Func, complex, float]],
    grid: Sequence[float],
    s: GDiffSettings = DEFAULT_GDIFF,
    right: Optional[Func] = None,
) -> float:
    """
    Maximal equation residual over the grid.

    coeffs = (beta,) checks v'_g - beta v - f; coeffs = (P, Q) checks
    v''_g + P v'_g + Q v - f, with v''_g obtained by applying the operator twice.
    """
    f = _as_func(rhs)
    if len(coeffs) == 1:
        beta = _as_func(coeffs[0])
        worst = 0.0
        for t in grid:
            dv = g_derivative_at(d, v, t, s, right)
            worst = max(worst, abs(dv - beta(t) * complex(v(t)) - complex(f(t))))
        logger.debug("first-order residual on %d points: %.3g", len(grid), worst)
        return worst

    if len(coeffs) != 2:
        raise DomainError(f"residual expects (beta,) or (P, Q), got {len(coeffs)} coefficients", _MODULE)
    P, Q = complex(coeffs[0]), complex(coeffs[1])

    def dv(t: float) -> complex:
        return g_derivative_at(d, v, t, s, right)

    def dv_right(t: float) -> complex:
        return g_derivative_right(d, v, t, s, right)

    worst = 0.0
    for t in grid:
        d1 = dv(t)
        d2 = g_derivative_at(d, dv, t, s, dv_right)
        worst = max(worst, abs(d2 + P * d1 + Q * complex(v(t)) - complex(f(t))))
    logger.debug("second-order residual on %d points: %.3g", len(grid), worst)
    return worst
