"""
Derivators on a working window [0, T].

PURPOSE:
A derivator g is a non-decreasing, left-continuous function used in place of
time in the denominator of a derivative. It is stored as g = g^C + g^B:
  - g^C: continuous part with g^C(0) = 0 (ContinuousPart)
  - g^B: cumulative sum of finitely many positive jumps, g^B(t) = sum over t_k < t (JumpSet)

WHAT IT DOES:
1. Evaluates g and its right limits g(t+)
2. Classifies points as regular, jump, flat interior or flat endpoint
3. Inverts the continuous part through the minimal pseudo-inverse
   gamma(x) = min{t : g^C(t) = x}
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import accumulate
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError

logger = logging.getLogger(__name__)

_MODULE = "derivator"

# Relative bisection tolerance for continuous parts without an analytic inverse.
TAU_GAMMA = 1e-13


class ContinuousKind(str, Enum):
    IDENTITY = "identity"
    PIECEWISE_LINEAR = "piecewise_linear"
    STAIRCASE_SAW = "staircase_saw"
    CALLABLE = "callable"


class PointClass(str, Enum):
    REGULAR = "regular"
    JUMP = "jump"
    FLAT_INTERIOR = "flat_interior"
    FLAT_LEFT_END = "flat_left_end"
    FLAT_RIGHT_END = "flat_right_end"


def staircase_saw_value(x: float) -> float:
    """Closed form of the staircase saw: slope 1 on [2k, 2k+1), flat on [2k+1, 2k+2]."""
    k = math.floor(x)
    if k % 2 == 1:
        return 0.5 + k / 2.0
    return x - k / 2.0


# ============================================================
# CONTINUOUS PART
# ============================================================

@dataclass(frozen=True)
class ContinuousPart:
    """
    Continuous non-decreasing part g^C on [0, domain_end].

    Catalog kinds are stored as piecewise-linear knots (exact evaluation and
    inversion). The CALLABLE kind wraps a user function, is assumed strictly
    increasing and is inverted by bisection.
    """

    kind: ContinuousKind
    domain_end: float
    knot_times: Tuple[float, ...] = ()
    knot_values: Tuple[float, ...] = ()
    func: Optional[Callable[[float], float]] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        T = self.domain_end
        if not (math.isfinite(T) and T > 0):
            raise DomainError(f"domain_end must be a finite positive time, got {T}", _MODULE)

        if self.kind is ContinuousKind.CALLABLE:
            if self.func is None:
                raise DomainError("callable continuous part needs a function", _MODULE)
            g0 = float(self.func(0.0))
            if abs(g0) > 1e-14:
                raise DomainError(f"continuous part must vanish at 0, got g^C(0)={g0}", _MODULE)
            return

        times, values = self.knot_times, self.knot_values
        if len(times) < 2 or len(times) != len(values):
            raise DomainError("continuous part needs at least two (time, value) knots", _MODULE)
        if times[0] != 0.0 or times[-1] != T:
            raise DomainError(f"knots must span [0, {T}], got [{times[0]}, {times[-1]}]", _MODULE)
        if values[0] != 0.0:
            raise DomainError(f"continuous part must vanish at 0, got g^C(0)={values[0]}", _MODULE)
        for i in range(1, len(times)):
            if not times[i] > times[i - 1]:
                raise DomainError(f"knot times must be strictly increasing (index {i})", _MODULE)
            if not values[i] >= values[i - 1]:
                raise DomainError(f"continuous part must be non-decreasing (knot {times[i]})", _MODULE)
        if not all(math.isfinite(v) for v in values):
            raise DomainError("continuous part values must be finite", _MODULE)

    # ---------- constructors ----------
    @classmethod
    def identity(cls, T: float) -> "ContinuousPart":
        return cls(ContinuousKind.IDENTITY, float(T), (0.0, float(T)), (0.0, float(T)))

    @classmethod
    def piecewise_linear(cls, breakpoints: Sequence[Tuple[float, float]], T: float) -> "ContinuousPart":
        """
        Build g^C from (t_i, slope_i) pairs; slope_i holds on [t_i, t_{i+1}).

        Args:
            breakpoints: sorted pairs, first time must be 0, slopes >= 0
            T: end of the window
        """
        T = float(T)
        if not breakpoints or float(breakpoints[0][0]) != 0.0:
            raise DomainError("piecewise_linear breakpoints must start at t=0", _MODULE)
        times: List[float] = []
        slopes: List[float] = []
        for t, slope in breakpoints:
            t, slope = float(t), float(slope)
            if slope < 0 or not math.isfinite(slope):
                raise DomainError(f"slope at t={t} must be finite and >= 0, got {slope}", _MODULE)
            if t >= T:
                raise DomainError(f"breakpoint {t} lies outside [0, {T})", _MODULE)
            if times and t <= times[-1]:
                raise DomainError("breakpoint times must be strictly increasing", _MODULE)
            times.append(t)
            slopes.append(slope)
        times.append(T)
        values = [0.0]
        for i, slope in enumerate(slopes):
            values.append(values[-1] + slope * (times[i + 1] - times[i]))
        return cls(ContinuousKind.PIECEWISE_LINEAR, T, tuple(times), tuple(values))

    @classmethod
    def staircase_saw(cls, T: float) -> "ContinuousPart":
        T = float(T)
        times = [float(k) for k in range(0, math.ceil(T)) if k < T] + [T]
        values = [staircase_saw_value(t) for t in times]
        return cls(ContinuousKind.STAIRCASE_SAW, T, tuple(times), tuple(values))

    @classmethod
    def from_callable(cls, func: Callable[[float], float], T: float) -> "ContinuousPart":
        return cls(ContinuousKind.CALLABLE, float(T), func=func)

    # ---------- evaluation ----------
    @property
    def is_knotted(self) -> bool:
        return self.kind is not ContinuousKind.CALLABLE

    @cached_property
    def _knot_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.knot_times, dtype=float), np.asarray(self.knot_values, dtype=float)

    def __call__(self, t: float) -> float:
        if not self.is_knotted:
            return float(self.func(t))
        times, values = self.knot_times, self.knot_values
        i = bisect.bisect_right(times, t) - 1
        i = min(max(i, 0), len(times) - 2)
        t0, t1 = times[i], times[i + 1]
        v0, v1 = values[i], values[i + 1]
        if t == t0 or v1 == v0:
            return v0
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    def evaluate_many(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if not self.is_knotted:
            return np.array([float(self.func(t)) for t in ts.ravel()]).reshape(ts.shape)
        times, values = self._knot_arrays
        return np.interp(ts, times, values)

    @cached_property
    def total(self) -> float:
        """g^C(T)."""
        return self(self.domain_end)

    def inverse(self, x: float) -> float:
        """Minimal pseudo-inverse gamma(x) = min{t : g^C(t) = x}."""
        total = self.total
        slack = 1e-14 * max(1.0, total)
        if not (-slack <= x <= total + slack):
            raise DomainError(f"pseudo-inverse argument {x} outside [0, {total}]", _MODULE)
        x = min(max(x, 0.0), total)

        if not self.is_knotted:
            return self._bisect_inverse(x)

        times, values = self.knot_times, self.knot_values
        i = bisect.bisect_left(values, x)
        if i == 0:
            return 0.0
        if i >= len(values):
            return times[-1]
        if values[i] == x:
            return times[i]
        v0, v1 = values[i - 1], values[i]
        return times[i - 1] + (x - v0) * (times[i] - times[i - 1]) / (v1 - v0)

    def inverse_right(self, x: float) -> float:
        """Maximal preimage max{t : g^C(t) = x}; differs from inverse() only on flat values."""
        if not self.is_knotted:
            return self.inverse(x)
        x = min(max(x, 0.0), self.total)
        times, values = self.knot_times, self.knot_values
        i = bisect.bisect_right(values, x) - 1
        if i < 0:
            return 0.0
        if values[i] == x or i == len(values) - 1:
            return times[i]
        v0, v1 = values[i], values[i + 1]
        return times[i] + (x - v0) * (times[i + 1] - times[i]) / (v1 - v0)

    def _bisect_inverse(self, x: float) -> float:
        lo, hi = 0.0, self.domain_end
        tol = TAU_GAMMA * max(1.0, self.domain_end)
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if self.func(mid) < x:
                lo = mid
            else:
                hi = mid
        return hi

    # ---------- structure ----------
    @cached_property
    def flat_intervals(self) -> Tuple[Tuple[float, float], ...]:
        """Maximal closed intervals [a, b] (a < b) on which g^C is constant."""
        if not self.is_knotted:
            return ()
        out: List[Tuple[float, float]] = []
        times, values = self.knot_times, self.knot_values
        for i in range(len(times) - 1):
            if values[i + 1] == values[i]:
                if out and out[-1][1] == times[i]:
                    out[-1] = (out[-1][0], times[i + 1])
                else:
                    out.append((times[i], times[i + 1]))
        return tuple(out)

    @cached_property
    def kinks(self) -> Tuple[float, ...]:
        """Interior knot times where the slope may change."""
        return tuple(self.knot_times[1:-1]) if self.is_knotted else ()


# ============================================================
# JUMP PART
# ============================================================

@dataclass(frozen=True)
class JumpSet:
    """Finite, strictly increasing jump times with strictly positive sizes."""

    times: Tuple[float, ...] = ()
    sizes: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if len(self.times) != len(self.sizes):
            raise DomainError("jump times and sizes differ in length", _MODULE)
        for i, (t, delta) in enumerate(zip(self.times, self.sizes)):
            if not (math.isfinite(t) and math.isfinite(delta)):
                raise DomainError(f"jump {i} is not finite: ({t}, {delta})", _MODULE)
            if delta <= 0:
                raise DomainError(f"jump size at t={t} must be > 0, got {delta}", _MODULE)
            if i and not t > self.times[i - 1]:
                raise DomainError(f"jump times must be strictly increasing (t={t})", _MODULE)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[float, float]]) -> "JumpSet":
        pairs = sorted((float(t), float(d)) for t, d in pairs)
        return cls(tuple(t for t, _ in pairs), tuple(d for _, d in pairs))

    @classmethod
    def periodic(cls, period: float, size: float, T: float) -> "JumpSet":
        """Jumps of equal size at k*period for k >= 1 inside (0, T); size 0 gives no jumps."""
        if period <= 0:
            raise DomainError(f"jump period must be > 0, got {period}", _MODULE)
        if size == 0:
            return cls()
        times = []
        k = 1
        while k * period < T:
            times.append(k * period)
            k += 1
        return cls(tuple(times), tuple(float(size) for _ in times))

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        return iter(zip(self.times, self.sizes))

    @cached_property
    def prefix_sums(self) -> Tuple[float, ...]:
        """prefix_sums[i] = sum of the first i sizes."""
        return (0.0,) + tuple(accumulate(self.sizes))

    def count_before(self, t: float) -> int:
        """Number of jumps at times strictly less than t."""
        return bisect.bisect_left(self.times, t)

    def sum_before(self, t: float) -> float:
        return self.prefix_sums[self.count_before(t)]

    def size_at(self, t: float) -> float:
        i = bisect.bisect_left(self.times, t)
        if i < len(self.times) and self.times[i] == t:
            return self.sizes[i]
        return 0.0


# ============================================================
# DERIVATOR
# ============================================================

@dataclass(frozen=True)
class Derivator:
    """g = g^C + g^B on [0, horizon], validated against the window conditions."""

    cont: ContinuousPart
    jumps: JumpSet = field(default_factory=JumpSet)
    horizon: Optional[float] = None
    # Window conditions: 0 is not a left flat end, T is not a right flat end or flat point.
    strict_window: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        T = self.cont.domain_end
        if self.horizon is None:
            object.__setattr__(self, "horizon", T)
        elif float(self.horizon) != T:
            raise DomainError(f"horizon {self.horizon} differs from continuous part end {T}", _MODULE)

        for t in self.jumps.times:
            if not 0.0 < t < T:
                raise DomainError(f"jump at t={t} outside the open window (0, {T})", _MODULE)

        if self.strict_window:
            for a, b in self.flat_components():
                if a == 0.0:
                    raise DomainError("g may not start with a flat segment (0 would be a left flat end)", _MODULE)
                if b >= T:
                    raise DomainError(f"T={T} may not end or lie inside a flat segment ({a}, {b})", _MODULE)

        logger.debug(
            "Derivator built: kind=%s T=%s jumps=%d flats=%d",
            self.cont.kind.value, T, len(self.jumps), len(self.flat_components()),
        )

    # ---------- convenience ----------
    @classmethod
    def identity(cls, T: float, jumps: Sequence[Tuple[float, float]] = ()) -> "Derivator":
        return cls(ContinuousPart.identity(T), JumpSet.from_pairs(jumps))

    @classmethod
    def pure_jump(cls, T: float, jumps: Sequence[Tuple[float, float]]) -> "Derivator":
        """g^C = 0; such a g is flat from 0, so the window conditions are not enforced."""
        cont = ContinuousPart.piecewise_linear([(0.0, 0.0)], T)
        return cls(cont, JumpSet.from_pairs(jumps), strict_window=False)

    @property
    def T(self) -> float:
        return self.cont.domain_end

    def _check_time(self, t: float, allow_end: bool = True) -> None:
        T = self.T
        if not (0.0 <= t <= T) or (not allow_end and t == T):
            window = f"[0, {T}]" if allow_end else f"[0, {T})"
            raise DomainError(f"time {t} outside {window}", _MODULE)

    # ---------- evaluation ----------
    def eval(self, t: float) -> float:
        """g(t) = g^C(t) + sum of jumps at t_k < t (left-continuous)."""
        self._check_time(t)
        return self.cont(t) + self.jumps.sum_before(t)

    def eval_right(self, t: float) -> float:
        """Right limit g(t+) = g(t) + jump at t."""
        self._check_time(t, allow_end=False)
        return self.eval(t) + self.jumps.size_at(t)

    def eval_many(self, ts: Sequence[float]) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if ts.size and (ts.min() < 0.0 or ts.max() > self.T):
            raise DomainError(f"times outside [0, {self.T}]", _MODULE)
        prefix = np.asarray(self.jumps.prefix_sums)
        idx = np.searchsorted(np.asarray(self.jumps.times, dtype=float), ts, side="left")
        return self.cont.evaluate_many(ts) + prefix[idx]

    def continuous_part(self, t: float) -> float:
        self._check_time(t)
        return self.cont(t)

    def jump_part(self, t: float) -> float:
        self._check_time(t)
        return self.jumps.sum_before(t)

    def jump_at(self, t: float) -> float:
        """Delta+g(t); zero off the jump set."""
        return self.jumps.size_at(t)

    def pseudo_inverse(self, x: float) -> float:
        return self.cont.inverse(x)

    # ---------- structure ----------
    def flat_components(self) -> Tuple[Tuple[float, float], ...]:
        return self._flat_components

    @cached_property
    def _flat_components(self) -> Tuple[Tuple[float, float], ...]:
        # g^C flats split at interior jumps; g is constant on each open piece.
        out: List[Tuple[float, float]] = []
        for a, b in self.cont.flat_intervals:
            inner = [t for t in self.jumps.times if a < t < b]
            edges = [a] + inner + [b]
            out.extend(zip(edges[:-1], edges[1:]))
        return tuple(out)

    def flat_component_at(self, t: float) -> Optional[Tuple[float, float]]:
        """Flat component (a, b) with a <= t <= b, preferring the one t lies inside."""
        hit = None
        for a, b in self._flat_components:
            if a < t < b:
                return (a, b)
            if a <= t <= b and hit is None:
                hit = (a, b)
        return hit

    def classify(self, t: float) -> PointClass:
        self._check_time(t)
        if self.jumps.size_at(t) > 0:
            return PointClass.JUMP
        for a, b in self._flat_components:
            if a < t < b:
                return PointClass.FLAT_INTERIOR
            if t == a:
                return PointClass.FLAT_LEFT_END
            if t == b:
                return PointClass.FLAT_RIGHT_END
        return PointClass.REGULAR

    @cached_property
    def _breakpoints(self) -> Tuple[float, ...]:
        pts = {0.0, self.T}
        pts.update(self.jumps.times)
        pts.update(self.cont.kinks)
        for a, b in self._flat_components:
            pts.update((a, b))
        return tuple(sorted(pts))

    def breakpoints(self) -> Tuple[float, ...]:
        """Sorted times where g or its slope may fail to be smooth, including 0 and T."""
        return self._breakpoints
