"""
Pydantic models for run configuration, derivator files and run summaries.
"""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Command(str, Enum):
    EXP = "exp"
    SINCOS = "sincos"
    SOLVE1 = "solve1"
    SOLVE2 = "solve2"
    OSCILLATOR = "oscillator"
    RESONANCE = "resonance"
    CONVERGE = "converge"


# Parameters each command cannot run without (after preset defaults are merged).
REQUIRED_PARAMETERS: Dict[Command, Tuple[str, ...]] = {
    Command.EXP: ("beta_re",),
    Command.SINCOS: ("omega0",),
    Command.SOLVE1: ("beta_re",),
    Command.SOLVE2: ("P", "Q"),
    Command.OSCILLATOR: ("omega0", "zeta"),
    Command.RESONANCE: ("omega0",),
    Command.CONVERGE: ("omega0", "h"),
}


# ============================================================
# DERIVATOR FILE SCHEMA
# ============================================================

class ContinuousSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["identity", "piecewise_linear", "staircase_saw"]
    params: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _breakpoints_present(self) -> "ContinuousSpec":
        if self.kind == "piecewise_linear":
            bps = self.params.get("breakpoints")
            if not bps:
                raise ValueError("piecewise_linear needs params.breakpoints = [[t, slope], ...]")
            if float(bps[0][0]) != 0.0:
                raise ValueError("the first piecewise_linear breakpoint must be at t = 0")
        return self


class PeriodicJumps(BaseModel):
    """Jumps of a common size at k * period inside (0, T)."""

    model_config = ConfigDict(extra="forbid")

    period: float = Field(gt=0)
    size: float = Field(ge=0)


class DerivatorSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    horizon: float = Field(gt=0)
    continuous: ContinuousSpec
    jumps: Union[PeriodicJumps, List[Tuple[float, float]]] = Field(default_factory=list)

    @field_validator("horizon")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("horizon must be finite")
        return v


# ============================================================
# RUN CONFIG
# ============================================================

class RunConfig(BaseModel):
    """
    One CLI invocation.

    Exactly one of `derivator_file` and `preset` names the derivator; preset
    parameters fill whatever the caller left unset.
    """

    model_config = ConfigDict(extra="forbid")

    command: Command
    derivator_file: Optional[Path] = None
    preset: Optional[str] = None

    omega0: Optional[float] = None
    zeta: Optional[float] = None
    x0: Optional[float] = None
    v0: Optional[float] = None
    beta_re: Optional[float] = None
    beta_im: Optional[float] = None
    P: Optional[float] = None
    Q: Optional[float] = None
    source: Optional[float] = None
    T: Optional[float] = None
    l: Optional[float] = None
    h: List[float] = Field(default_factory=list)
    l_sweep: List[float] = Field(default_factory=list)

    n_points: int = Field(default=401, ge=2)
    output_dir: Path = Path("out")
    emit_svg: bool = False

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        if (self.derivator_file is None) == (self.preset is None):
            raise ValueError("give exactly one of derivator_file and preset")
        for name in ("omega0", "zeta", "x0", "v0", "beta_re", "beta_im", "P", "Q", "source", "T", "l"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ValueError(f"parameter {name} must be finite, got {value}")
        if any(not math.isfinite(h) or h <= 0 for h in self.h):
            raise ValueError(f"grid spacings must be finite and > 0, got {self.h}")
        if any(not math.isfinite(l) or l < 0 for l in self.l_sweep):
            raise ValueError(f"l_sweep values must be finite and >= 0, got {self.l_sweep}")
        return self

    def parameters(self) -> Dict[str, Any]:
        """Numeric parameters the caller actually set."""
        keys = ("omega0", "zeta", "x0", "v0", "beta_re", "beta_im", "P", "Q", "source", "T", "l")
        params: Dict[str, Any] = {k: getattr(self, k) for k in keys if getattr(self, k) is not None}
        if self.h:
            params["h"] = list(self.h)
        return params


class RunSummary(BaseModel):
    command: Command
    exit_code: int
    files: List[Path] = Field(default_factory=list)
    message: Optional[str] = None
    rows: int = 0
