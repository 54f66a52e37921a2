"""
Stieltjes Differential Calculus Package
"""

from .derivator import ContinuousPart, Derivator, JumpSet, PointClass
from .errors import (
    AccuracyError,
    ConfigError,
    DegeneratePointError,
    DivergenceError,
    DomainError,
    StieltjesError,
    TruncationError,
)
from .first_order import Coefficient, g_exp, g_sin_cos, green_first_order, solve_first_order
from .g_derivative import GDiffSettings, g_derivative_at, residual
from .oscillator import OscillatorSpec, example1_derivator, solve_oscillator, solve_resonance
from .scheme import build_grid, convergence_study, integrate
from .second_order import SecondOrderProblem, green_second_order, solve_homogeneous, solve_nonhomogeneous
from .stieltjes_integral import QuadratureSettings, ls_integral, ls_measure

__all__ = [
    'ContinuousPart', 'Derivator', 'JumpSet', 'PointClass',
    'AccuracyError', 'ConfigError', 'DegeneratePointError', 'DivergenceError',
    'DomainError', 'StieltjesError', 'TruncationError',
    'Coefficient', 'g_exp', 'g_sin_cos', 'green_first_order', 'solve_first_order',
    'GDiffSettings', 'g_derivative_at', 'residual',
    'OscillatorSpec', 'example1_derivator', 'solve_oscillator', 'solve_resonance',
    'build_grid', 'convergence_study', 'integrate',
    'SecondOrderProblem', 'green_second_order', 'solve_homogeneous', 'solve_nonhomogeneous',
    'QuadratureSettings', 'ls_integral', 'ls_measure',
]
