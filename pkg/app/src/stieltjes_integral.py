"""
Lebesgue-Stieltjes integrals over [t1, t2) against mu_g.

The integral is split into a continuous and a jump contribution:

    int_[0,t) f dmu_g = int_[0, g^C(t)) f(gamma(x)) dx  +  sum_{t_k < t} f(t_k) Delta_k

The continuous contribution is computed by adaptive Simpson on the
transformed axis x = g^C(t), cut into panels at the images of every
kink, flat end and jump time so that f o gamma is smooth on each panel.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

from .derivator import Derivator
from .errors import AccuracyError, DomainError

logger = logging.getLogger(__name__)

_MODULE = "stieltjes_integral"

Integrand = Callable[[float], complex]


@dataclass(frozen=True)
class QuadratureSettings:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_subdivisions: int = 200_000

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError(f"quadrature tolerances must be > 0, got {self.abs_tol}, {self.rel_tol}", _MODULE)
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1", _MODULE)


DEFAULT_QUADRATURE = QuadratureSettings()


def ls_measure(d: Derivator, t1: float, t2: float) -> float:
    """mu_g([t1, t2)) = g(t2) - g(t1)."""
    if t1 > t2:
        raise DomainError(f"interval start {t1} is after its end {t2}", _MODULE)
    return d.eval(t2) - d.eval(t1)


def jump_sum(d: Derivator, f: Integrand, t1: float, t2: float) -> complex:
    """Sum of f(t_k) * Delta_k over jumps with t1 <= t_k < t2."""
    jumps = d.jumps
    lo, hi = jumps.count_before(t1), jumps.count_before(t2)
    total = 0j
    for k in range(lo, hi):
        total += complex(f(jumps.times[k])) * jumps.sizes[k]
    return total


def jump_weighted_measure(d: Derivator, phi: Callable[[float], complex], t: float) -> complex:
    """
    Exact integral over [0, t) of s -> phi(Delta+g(s)).

    Off the jump set the integrand is phi(0), so the continuous contribution
    is phi(0) * g^C(t); each jump contributes phi(Delta_k) * Delta_k.
    """
    total = complex(phi(0.0)) * d.continuous_part(t)
    jumps = d.jumps
    for k in range(jumps.count_before(t)):
        delta = jumps.sizes[k]
        total += complex(phi(delta)) * delta
    return total


# ============================================================
# CONTINUOUS PART (TRANSFORMED AXIS)
# ============================================================

def _panel_cuts(d: Derivator, x_lo: float, x_hi: float) -> List[float]:
    images = {x_lo, x_hi}
    for t in d.breakpoints():
        x = d.cont(t)
        if x_lo < x < x_hi:
            images.add(x)
    return sorted(images)


class _Budget:
    __slots__ = ("splits", "exhausted", "evaluations")

    def __init__(self) -> None:
        self.splits = 0
        self.exhausted = False
        self.evaluations = 0


def _refine(
    phi: Callable[[float], complex],
    panel: Tuple[float, float, complex, complex, complex, complex],
    tol: float,
    q: QuadratureSettings,
    budget: _Budget,
) -> Tuple[complex, float]:
    a0, b0 = panel[0], panel[1]
    min_width = 1e-14 * max(1.0, abs(b0))
    stack = [panel + (tol,)]
    total = 0j
    error = 0.0
    while stack:
        a, b, fa, fm, fb, whole, tol_here = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = phi(lm), phi(rm)
        budget.evaluations += 2
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        converged = abs(delta) <= 15.0 * tol_here or (b - a) <= min_width
        if converged or budget.splits >= q.max_subdivisions:
            if not converged:
                budget.exhausted = True
            total += left + right + delta / 15.0
            error += abs(delta) / 15.0
            continue
        budget.splits += 1
        stack.append((a, m, fa, flm, fm, left, 0.5 * tol_here))
        stack.append((m, b, fm, frm, fb, right, 0.5 * tol_here))
    logger.debug("panel [%.6g, %.6g] refined, error estimate %.3g", a0, b0, error)
    return total, error


def continuous_integral(
    d: Derivator,
    f: Integrand,
    t1: float,
    t2: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> complex:
    """int_[t1,t2) f dmu_{g^C}, computed as int_[g^C(t1), g^C(t2)) f(gamma(x)) dx."""
    if t1 > t2:
        raise DomainError(f"interval start {t1} is after its end {t2}", _MODULE)
    x_lo, x_hi = d.continuous_part(t1), d.continuous_part(t2)
    if x_hi <= x_lo:
        return 0j

    cont = d.cont

    def phi(x: float) -> complex:
        return complex(f(cont.inverse(x)))

    # Panel ends use one-sided limits; mu_{g^C} does not see values at isolated points.
    def phi_right(x: float) -> complex:
        return complex(f(math.nextafter(cont.inverse_right(x), math.inf)))

    def phi_left(x: float) -> complex:
        return complex(f(math.nextafter(cont.inverse(x), -math.inf)))

    cuts = _panel_cuts(d, x_lo, x_hi)
    panels = []
    coarse = 0j
    for a, b in zip(cuts[:-1], cuts[1:]):
        fa, fm, fb = phi_right(a), phi(0.5 * (a + b)), phi_left(b)
        whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
        coarse += whole
        panels.append((a, b, fa, fm, fb, whole))

    length = x_hi - x_lo
    tol_total = max(q.abs_tol, q.rel_tol * abs(coarse))
    budget = _Budget()
    budget.evaluations = 3 * len(panels)
    total = 0j
    error = 0.0
    for panel in panels:
        part, err = _refine(phi, panel, tol_total * (panel[1] - panel[0]) / length, q, budget)
        total += part
        error += err

    logger.debug(
        "continuous integral on [%.6g, %.6g): panels=%d evaluations=%d error=%.3g",
        t1, t2, len(panels), budget.evaluations, error,
    )
    if budget.exhausted:
        raise AccuracyError(
            f"quadrature did not converge within {q.max_subdivisions} subdivisions "
            f"(estimate {total}, error bound {error:.3g})",
            estimate=total,
            error_bound=error,
            module=_MODULE,
        )
    return total


# ============================================================
# PUBLIC INTEGRALS
# ============================================================

def ls_integral_between(
    d: Derivator,
    f: Integrand,
    t1: float,
    t2: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> complex:
    """int_[t1, t2) f dmu_g; a jump exactly at t2 is excluded, one at t1 is included."""
    d.eval(t1)
    d.eval(t2)
    if t1 > t2:
        raise DomainError(f"interval start {t1} is after its end {t2}", _MODULE)
    return continuous_integral(d, f, t1, t2, q) + jump_sum(d, f, t1, t2)


def ls_integral(
    d: Derivator,
    f: Integrand,
    t: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> complex:
    """
    int_[0,t) f dmu_g for a complex integrand.

    Args:
        d: derivator
        f: integrand, finite on [0, t); its value at a jump time t_k is the
           pre-jump value used in the jump sum
        t: upper end (excluded)
        q: tolerances of the adaptive quadrature

    Returns:
        Complex value of the integral.

    Raises:
        DomainError: t outside the window
        AccuracyError: the adaptive quadrature ran out of subdivisions
    """
    return ls_integral_between(d, f, 0.0, t, q)
