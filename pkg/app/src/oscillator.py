"""
The Stieltjes harmonic oscillator

    v''_g + 2 zeta omega0 v'_g + omega0^2 v = 0,    v(0) = x0,  v'_g(0) = v0

in its three damping regimes, and the resonance problem

    v''_g + omega0^2 v = cos_g(omega0; 0, t).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

from .derivator import ContinuousPart, Derivator, JumpSet
from .errors import DomainError
from .first_order import GExpResult, GSinCos, g_exp, g_sin_cos, modulated_coefficient
from .second_order import (
    SecondOrderProblem,
    SecondOrderSolution,
    solve_homogeneous,
    validate_roots,
)
from .stieltjes_integral import DEFAULT_QUADRATURE, QuadratureSettings, jump_weighted_measure
from .trajectory import Trajectory, sample

logger = logging.getLogger(__name__)

_MODULE = "oscillator"

# Jump sizes of the periodic-jump sweep: 0, 1/3^3, 1/3^2, 1/3, 1.
L_SWEEP: Tuple[float, ...] = (0.0, 1.0 / 27.0, 1.0 / 9.0, 1.0 / 3.0, 1.0)
JUMP_PERIOD = math.pi / 4.0


class Regime(str, Enum):
    OVERDAMPED = "overdamped"
    CRITICAL = "critical"
    UNDERDAMPED = "underdamped"


def example1_derivator(kind: str, l: float, T: float) -> Derivator:
    """
    g1 = t + g^B or g2 = staircase saw + g^B, with jumps of size l at k*pi/4.

    Args:
        kind: "g1" or "g2"
        l: common jump size (0 removes the jumps)
        T: end of the window
    """
    if kind == "g1":
        cont = ContinuousPart.identity(T)
    elif kind == "g2":
        cont = ContinuousPart.staircase_saw(T)
    else:
        raise DomainError(f"unknown periodic-jump derivator '{kind}' (expected g1 or g2)", _MODULE)
    return Derivator(cont, JumpSet.periodic(JUMP_PERIOD, l, T))


@dataclass(frozen=True)
class OscillatorSpec:
    omega0: float
    zeta: float
    x0: float
    v0: float
    derivator: Derivator

    def __post_init__(self) -> None:
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise DomainError(f"omega0 must be > 0, got {self.omega0}", _MODULE)
        if not (math.isfinite(self.zeta) and self.zeta >= 0):
            raise DomainError(f"zeta must be >= 0, got {self.zeta}", _MODULE)

    @classmethod
    def from_physical(
        cls, m: float, k: float, c: float, x0: float, v0: float, derivator: Derivator
    ) -> "OscillatorSpec":
        """omega0 = sqrt(k/m), zeta = c / (2 sqrt(m k))."""
        if m <= 0 or k <= 0 or c < 0:
            raise DomainError(f"need m > 0, k > 0, c >= 0; got m={m}, k={k}, c={c}", _MODULE)
        return cls(math.sqrt(k / m), c / (2.0 * math.sqrt(m * k)), x0, v0, derivator)

    @property
    def P(self) -> float:
        return 2.0 * self.zeta * self.omega0

    @property
    def Q(self) -> float:
        return self.omega0 ** 2


def regime(spec: OscillatorSpec) -> Regime:
    if spec.zeta > 1:
        return Regime.OVERDAMPED
    if spec.zeta == 1:
        return Regime.CRITICAL
    return Regime.UNDERDAMPED


def characteristic_roots(spec: OscillatorSpec) -> Tuple[complex, complex]:
    """lambda = -zeta omega0 +- omega0 sqrt(zeta^2 - 1)."""
    w, z = spec.omega0, spec.zeta
    root = w * complex(z * z - 1) ** 0.5
    return -z * w + root, -z * w - root


def _real(z: complex, module: str = _MODULE) -> float:
    if abs(z.imag) > 1e-12 * (1 + abs(z.real)):
        raise DomainError(f"real-valued solution has imaginary residue {z.imag:.3g}", module)
    return z.real


# ============================================================
# DAMPED OSCILLATOR
# ============================================================

@dataclass(frozen=True)
class OscillatorSolution:
    """
    Real solution of the damped oscillator.

    `reference` is the same solution in complex-exponential form; it supplies
    the exact g-derivative used for right limits.
    """

    spec: OscillatorSpec
    regime: Regime
    reference: SecondOrderSolution
    envelope: Optional[GExpResult] = None
    sincos: Optional[GSinCos] = None

    def __call__(self, t: float) -> float:
        if self.regime is not Regime.UNDERDAMPED:
            return _real(self.reference(t))
        a = -self.spec.zeta * self.spec.omega0
        b = self.spec.omega0 * math.sqrt(1.0 - self.spec.zeta ** 2)
        x0, v0 = self.spec.x0, self.spec.v0
        bracket = (v0 - a * x0) / b * self.sincos.sin(t) + x0 * self.sincos.cos(t)
        return _real(self.envelope(t)) * bracket

    def derivative(self, t: float) -> float:
        return _real(self.reference.derivative(t))

    def value_right(self, t: float) -> float:
        delta = self.spec.derivator.jump_at(t)
        if delta == 0:
            return self(t)
        return self(t) + self.derivative(t) * delta

    def trajectory(self, n_points: int = 401) -> Trajectory:
        return sample(self.spec.derivator, self, n_points, right=self.value_right)


def solve_oscillator(spec: OscillatorSpec, q: QuadratureSettings = DEFAULT_QUADRATURE) -> OscillatorSolution:
    """
    Closed form by damping regime.

    Underdamped (zeta < 1), with a = -zeta omega0 and b = omega0 sqrt(1 - zeta^2):
        v = exp_g(a) [ (v0 - a x0)/b sin_g(b/(1 + a Delta)) + x0 cos_g(b/(1 + a Delta)) ]
    Critical and overdamped use the double / distinct real-root formulas.

    Raises:
        DomainError: a characteristic root annihilates a jump factor
    """
    d = spec.derivator
    validate_roots(d, characteristic_roots(spec))
    kind = regime(spec)
    prob = SecondOrderProblem(P=spec.P, Q=spec.Q, x0=spec.x0, v0=spec.v0)
    reference = solve_homogeneous(d, prob, q)
    logger.debug("oscillator omega0=%s zeta=%s regime=%s", spec.omega0, spec.zeta, kind.value)

    if kind is not Regime.UNDERDAMPED:
        return OscillatorSolution(spec, kind, reference)

    a = -spec.zeta * spec.omega0
    b = spec.omega0 * math.sqrt(1.0 - spec.zeta ** 2)
    envelope = g_exp(d, a, q=q)
    sincos = g_sin_cos(d, modulated_coefficient(d, a, b), q=q)
    return OscillatorSolution(spec, kind, reference, envelope, sincos)


# ============================================================
# RESONANCE
# ============================================================

@dataclass(frozen=True)
class ResonanceSolution:
    spec: OscillatorSpec
    sincos: GSinCos

    def amplitude_factor(self, t: float) -> float:
        """int_[0,t) 1 / (1 + omega0^2 Delta^2) dmu_g."""
        w2 = self.spec.omega0 ** 2
        return jump_weighted_measure(self.spec.derivator, lambda delta: 1 / (1 + w2 * delta * delta), t).real

    def phase_factor(self, t: float) -> float:
        """int_[0,t) Delta / (1 + omega0^2 Delta^2) dmu_g."""
        w2 = self.spec.omega0 ** 2
        return jump_weighted_measure(self.spec.derivator, lambda delta: delta / (1 + w2 * delta * delta), t).real

    def _combine(self, sin_t: float, cos_t: float, amp: float, phase: float) -> float:
        w, x0, v0 = self.spec.omega0, self.spec.x0, self.spec.v0
        return x0 * cos_t + v0 / w * sin_t + sin_t * amp / (2 * w) - 0.5 * cos_t * phase

    def __call__(self, t: float) -> float:
        return self._combine(self.sincos.sin(t), self.sincos.cos(t), self.amplitude_factor(t), self.phase_factor(t))

    def value_right(self, t: float) -> float:
        delta = self.spec.derivator.jump_at(t)
        if delta == 0:
            return self(t)
        w2 = self.spec.omega0 ** 2
        amp = self.amplitude_factor(t) + delta / (1 + w2 * delta * delta)
        phase = self.phase_factor(t) + delta * delta / (1 + w2 * delta * delta)
        return self._combine(self.sincos.sin_right(t), self.sincos.cos_right(t), amp, phase)

    def source(self, t: float) -> float:
        """The forcing cos_g(omega0; 0, t)."""
        return self.sincos.cos(t)

    def trajectory(self, n_points: int = 401) -> Trajectory:
        return sample(self.spec.derivator, self, n_points, right=self.value_right)


def solve_resonance(spec: OscillatorSpec, q: QuadratureSettings = DEFAULT_QUADRATURE) -> ResonanceSolution:
    """
    v = x0 cos_g + (v0/omega0) sin_g + sin_g A(t) / (2 omega0) - cos_g B(t) / 2

    with A(t) = int 1/(1 + omega0^2 Delta^2) dmu_g and B(t) = int Delta/(1 + omega0^2 Delta^2) dmu_g.
    The damping ratio zeta is ignored.
    """
    return ResonanceSolution(spec, g_sin_cos(spec.derivator, spec.omega0, q=q))


def sweep_jump_sizes(
    kind: str,
    build: Callable[[Derivator], object],
    T: float,
    sizes: Sequence[float] = L_SWEEP,
) -> List[Tuple[float, object]]:
    """Apply build() to the periodic-jump derivator for each jump size."""
    return [(l, build(example1_derivator(kind, l, T))) for l in sizes]
