"""
Predictor-corrector integrator for systems y'_g = F(t, y).

On a grid {t_j} that contains every jump time, each step is
  1. jump step:  y+_j    = y_j + F(t_j, y_j) Delta+g(t_j)
  2. predictor:  y*_{j+1} = y+_j + F(t_j+, y+_j) (g(t_{j+1}) - g(t_j+))
  3. corrector:  y_{j+1}  = y+_j + (F(t_j+, y+_j) + F(t_{j+1}-, y*_{j+1})) / 2 * (g(t_{j+1}) - g(t_j+))

The corrector increment uses g(t_j+) as in the predictor.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence

import numpy as np
import pandas as pd

from .derivator import Derivator
from .errors import DivergenceError, DomainError
from .first_order import g_sin_cos
from .g_derivative import right_offset
from .oscillator import OscillatorSpec, example1_derivator, solve_resonance
from .stieltjes_integral import DEFAULT_QUADRATURE, QuadratureSettings

logger = logging.getLogger(__name__)

_MODULE = "scheme"

# Reference resonance run: g2 with jumps of 1/3 at k*pi/4, omega0 = 2, x0 = v0 = 1.
TABLE1_H = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
TABLE1_ERRORS = (4.5260e-01, 3.8906e-03, 3.8335e-05, 3.8274e-07, 3.8273e-09, 3.6102e-11)
TABLE1_T = 8.5


@dataclass(frozen=True)
class SystemRHS:
    func: Callable[[float, np.ndarray], np.ndarray] = field(repr=False)
    dim: int

    def __call__(self, t: float, y: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(t, y), dtype=complex)


@dataclass(frozen=True)
class SchemeGrid:
    times: np.ndarray
    h: float

    def __post_init__(self) -> None:
        times = self.times
        if self.h <= 0:
            raise DomainError(f"grid spacing must be > 0, got {self.h}", _MODULE)
        if len(times) < 2 or times[0] != 0.0:
            raise DomainError("grid must start at 0 and hold at least two nodes", _MODULE)
        if np.any(np.diff(times) <= 0):
            raise DomainError("grid times must be strictly increasing", _MODULE)


def build_grid(d: Derivator, h: float) -> SchemeGrid:
    """Uniform nodes k*h below T, plus T, plus every jump time."""
    if h <= 0 or not math.isfinite(h):
        raise DomainError(f"grid spacing must be a finite positive number, got {h}", _MODULE)
    n = math.ceil(d.T / h - 1e-9)
    uniform = [k * h for k in range(n)]
    times = np.unique(np.asarray(uniform + list(d.jumps.times) + [d.T], dtype=float))
    logger.debug("scheme grid: h=%s nodes=%d (jumps inserted: %d)", h, len(times), len(d.jumps))
    return SchemeGrid(times=times, h=h)


def integrate(d: Derivator, rhs: SystemRHS, y0: Sequence[complex], grid: SchemeGrid) -> np.ndarray:
    """
    Run the predictor-corrector recurrence.

    Returns:
        Array of shape (len(grid.times), rhs.dim); row j is y_j, the state at t_j
        before the jump at t_j is applied.

    Raises:
        DivergenceError: a non-finite state appears
    """
    y = np.asarray(y0, dtype=complex)
    if y.shape != (rhs.dim,):
        raise DomainError(f"initial state has shape {y.shape}, expected ({rhs.dim},)", _MODULE)

    times = grid.times
    if times[-1] > d.T:
        raise DomainError(f"grid ends at {times[-1]} past T={d.T}", _MODULE)
    g_left = d.eval_many(times)
    sizes = np.array([d.jump_at(t) for t in times])
    eps0 = right_offset(d)

    states = np.empty((len(times), rhs.dim), dtype=complex)
    states[0] = y
    for j in range(len(times) - 1):
        t_j, t_next = times[j], times[j + 1]
        delta = sizes[j]
        if delta > 0:
            y_plus = y + rhs(t_j, y) * delta
            t_plus = t_j + eps0
        else:
            y_plus = y
            t_plus = t_j
        dg = g_left[j + 1] - (g_left[j] + delta)
        k1 = rhs(t_plus, y_plus)
        y_star = y_plus + k1 * dg
        k2 = rhs(t_next, y_star)
        y = y_plus + 0.5 * (k1 + k2) * dg
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"non-finite state at node {j + 1} (t={t_next})", node=j + 1, time=t_next)
        states[j + 1] = y
    return states


def oscillator_rhs(d: Derivator, omega0: float, q: QuadratureSettings = DEFAULT_QUADRATURE) -> SystemRHS:
    """F(t, (u, v)) = (cos_g(omega0; 0, t) - omega0^2 v, u)."""
    sc = g_sin_cos(d, omega0, q=q)
    w2 = omega0 ** 2

    def func(t: float, y: np.ndarray) -> np.ndarray:
        return np.array([sc.cos(t) - w2 * y[1], y[0]], dtype=complex)

    return SystemRHS(func=func, dim=2)


# ============================================================
# CONVERGENCE STUDY
# ============================================================

@dataclass(frozen=True)
class ConvergenceStudy:
    rows: List[Dict[str, float]]
    slope: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=["h", "e_h", "order"])


def convergence_study(
    d: Derivator,
    rhs: SystemRHS,
    y0: Sequence[complex],
    exact: Callable[[float], complex],
    h_list: Sequence[float],
    component: int = 1,
) -> ConvergenceStudy:
    """
    e_h = max_j |exact(t_j) - y_{component, j}| for each h.

    `order` is the local slope against the previous row; `slope` is the
    least-squares fit of log e_h against log h.
    """
    rows: List[Dict[str, float]] = []
    for h in h_list:
        grid = build_grid(d, h)
        states = integrate(d, rhs, y0, grid)
        reference = np.array([complex(exact(t)) for t in grid.times])
        e_h = float(np.max(np.abs(reference - states[:, component])))
        order = float("nan")
        if rows and rows[-1]["e_h"] > 0 and e_h > 0:
            order = math.log(e_h / rows[-1]["e_h"]) / math.log(h / rows[-1]["h"])
        rows.append({"h": float(h), "e_h": e_h, "order": order})
        logger.info("convergence row h=%.1e e_h=%.4e order=%.3f", h, e_h, order)

    slope = float("nan")
    usable = [(r["h"], r["e_h"]) for r in rows if r["e_h"] > 0]
    if len(usable) >= 2:
        hs, es = zip(*usable)
        slope = float(np.polyfit(np.log(hs), np.log(es), 1)[0])
    return ConvergenceStudy(rows=rows, slope=slope)


def table1_study(
    h_list: Sequence[float] = TABLE1_H[:4],
    T: float = TABLE1_T,
    l: float = 1.0 / 3.0,
    omega0: float = 2.0,
    x0: float = 1.0,
    v0: float = 1.0,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> ConvergenceStudy:
    """Scheme against the closed-form resonance solution on the g2 derivator."""
    d = example1_derivator("g2", l, T)
    spec = OscillatorSpec(omega0=omega0, zeta=0.0, x0=x0, v0=v0, derivator=d)
    exact = solve_resonance(spec, q)
    return convergence_study(d, oscillator_rhs(d, omega0, q), (v0, x0), exact, h_list, component=1)
