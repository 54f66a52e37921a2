"""
Sampled solutions with explicit pre-jump and post-jump rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd

from .derivator import Derivator


@dataclass(frozen=True)
class Trajectory:
    """
    Values of a solution on a sorted time grid.

    Each jump time t_k appears twice: first with v(t_k), then with the right
    limit v(t_k+) and post=True.
    """

    times: np.ndarray
    values: np.ndarray
    post: np.ndarray

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0))

    def to_frame(self, real_output: bool = False) -> pd.DataFrame:
        frame = pd.DataFrame({"t": self.times, "value": self.values.real})
        if not real_output:
            frame["value_im"] = self.values.imag
        frame["post"] = self.post.astype(int)
        return frame


def sample_times(d: Derivator, n_points: int = 401) -> Tuple[np.ndarray, np.ndarray]:
    """Uniform grid on [0, T] merged with the jump times; jump times are doubled."""
    base = np.linspace(0.0, d.T, n_points)
    times: List[float] = []
    post: List[bool] = []
    merged = sorted(set(base.tolist()) | set(d.jumps.times))
    for t in merged:
        times.append(t)
        post.append(False)
        if d.jump_at(t) > 0:
            times.append(t)
            post.append(True)
    return np.asarray(times, dtype=float), np.asarray(post, dtype=bool)


def sample(
    d: Derivator,
    func: Callable[[float], complex],
    n_points: int = 401,
    right: Optional[Callable[[float], complex]] = None,
) -> Trajectory:
    """
    Sample func on the trajectory grid of d.

    Args:
        d: derivator whose jump times get a post row
        func: the solution, evaluated at each grid time
        n_points: number of uniform nodes on [0, T]
        right: right-limit evaluator; defaults to func at the next float after t_k
    """
    if right is None:
        def right(t: float) -> complex:
            return func(math.nextafter(t, math.inf))

    times, post = sample_times(d, n_points)
    values = np.array(
        [complex(right(t)) if p else complex(func(t)) for t, p in zip(times, post)],
        dtype=complex,
    )
    return Trajectory(times=times, values=values, post=post)
