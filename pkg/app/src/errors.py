"""
Exception hierarchy for the Stieltjes calculus package.

Every error names the module that raised it so the CLI can report
"<module>: <message>" and map the class to an exit code.
"""

from __future__ import annotations

from typing import Optional


class StieltjesError(Exception):
    """Base class for all errors raised by the package."""

    def __init__(self, message: str, module: str = "stieltjes") -> None:
        super().__init__(message)
        self.module = module

    def __str__(self) -> str:
        return f"{self.module}: {self.args[0]}"


class DomainError(StieltjesError, ValueError):
    """Input outside the mathematical domain (time window, derivator, roots)."""


class TruncationError(DomainError):
    """Query past the truncation time t0 where a jump factor vanishes."""

    def __init__(self, message: str, t0: float, module: str = "first_order") -> None:
        super().__init__(message, module)
        self.t0 = t0


class DegeneratePointError(DomainError):
    """The g-difference quotient has a vanishing denominator for every step."""

    def __init__(self, message: str, t: float, module: str = "g_derivative") -> None:
        super().__init__(message, module)
        self.t = t


class AccuracyError(StieltjesError, ArithmeticError):
    """Quadrature did not meet its tolerance within the subdivision budget."""

    def __init__(
        self,
        message: str,
        estimate: complex,
        error_bound: float,
        module: str = "stieltjes_integral",
    ) -> None:
        super().__init__(message, module)
        self.estimate = estimate
        self.error_bound = error_bound


class DivergenceError(StieltjesError, ArithmeticError):
    """Non-finite state produced by the time-stepping scheme."""

    def __init__(self, message: str, node: int, time: Optional[float] = None, module: str = "scheme") -> None:
        super().__init__(message, module)
        self.node = node
        self.time = time


class ConfigError(StieltjesError, ValueError):
    """Malformed derivator file, preset name or run parameter."""

    def __init__(self, message: str, module: str = "cli") -> None:
        super().__init__(message, module)
