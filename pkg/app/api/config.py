"""
Derivator config files and named presets.

A derivator file starts with the header line `stieltjes-derivator v1`; the
rest of the file is a JSON object validated by DerivatorSpec. Presets live
in data_push/presets.json; keys starting with "_" are metadata.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from app.src.derivator import ContinuousPart, Derivator, JumpSet
from app.src.errors import ConfigError, DomainError

from .models import DerivatorSpec, PeriodicJumps

logger = logging.getLogger(__name__)

HEADER = "stieltjes-derivator v1"

# ============================================================
# CONFIG LOADING
# ============================================================

_CONFIG_CACHE: Dict[str, DerivatorSpec] = {}
_PRESET_CACHE: Dict[str, Dict[str, Any]] = {}

DEFAULT_PRESETS_PATH = Path(__file__).parent.parent.parent / "data_push" / "presets.json"


def parse_derivator_text(text: str, origin: str = "<string>") -> DerivatorSpec:
    """Parse the contents of a derivator file."""
    lines = text.splitlines()
    i = 0
    while i < len(lines) and not lines[i].strip():
        i += 1
    if i == len(lines) or lines[i].strip() != HEADER:
        raise ConfigError(f"{origin}: first non-blank line must be '{HEADER}'")
    try:
        data = json.loads("\n".join(lines[i + 1:]))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{origin}: invalid JSON body ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{origin}: body must be a JSON object")
    return parse_derivator_spec(_strip_meta(data), origin)


def parse_derivator_spec(data: Dict[str, Any], origin: str = "<dict>") -> DerivatorSpec:
    try:
        return DerivatorSpec.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"{origin}: {exc.error_count()} invalid field(s): {_first_error(exc)}") from exc


def load_derivator_file(path: Path) -> DerivatorSpec:
    """Read and validate a derivator file; results are cached per resolved path."""
    p = str(Path(path).resolve())
    if p in _CONFIG_CACHE:
        return _CONFIG_CACHE[p]
    try:
        text = Path(p).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read derivator file {path}: {exc.strerror or exc}") from exc
    spec = parse_derivator_text(text, origin=str(path))
    _CONFIG_CACHE[p] = spec
    logger.debug("loaded derivator file %s", p)
    return spec


def load_presets(path: Optional[Path] = None) -> Dict[str, Dict[str, Any]]:
    p = str(Path(path or DEFAULT_PRESETS_PATH).resolve())
    if p in _PRESET_CACHE:
        return _PRESET_CACHE[p]
    try:
        data = json.loads(Path(p).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load presets from {p}: {exc}") from exc
    presets = _strip_meta(data)
    _PRESET_CACHE[p] = presets
    return presets


def list_presets(path: Optional[Path] = None) -> List[str]:
    return sorted(load_presets(path))


@dataclass(frozen=True)
class Preset:
    name: str
    derivator: DerivatorSpec
    parameters: Dict[str, Any] = field(default_factory=dict)
    # Published e_h per grid spacing h.
    reference_errors: Dict[float, float] = field(default_factory=dict)


def load_preset(name: str, path: Optional[Path] = None) -> Preset:
    presets = load_presets(path)
    if name not in presets:
        raise ConfigError(f"unknown preset '{name}' (available: {', '.join(sorted(presets))})")
    entry = _strip_meta(presets[name])
    if "derivator" not in entry:
        raise ConfigError(f"preset '{name}' has no derivator")
    return Preset(
        name=name,
        derivator=parse_derivator_spec(_strip_meta(entry["derivator"]), origin=f"preset {name}"),
        parameters=dict(entry.get("parameters", {})),
        reference_errors=_reference(entry.get("reference", {}), name),
    )


# ============================================================
# DERIVATOR CONSTRUCTION
# ============================================================

def with_overrides(spec: DerivatorSpec, T: Optional[float] = None, l: Optional[float] = None) -> DerivatorSpec:
    """Replace the horizon and/or the periodic jump size."""
    update: Dict[str, Any] = {}
    if T is not None:
        if not T > 0:
            raise ConfigError(f"T must be > 0, got {T}")
        update["horizon"] = T
    if l is not None:
        if not isinstance(spec.jumps, PeriodicJumps):
            raise ConfigError("a jump size override needs periodic jumps {period, size}")
        try:
            update["jumps"] = PeriodicJumps(period=spec.jumps.period, size=l)
        except ValidationError as exc:
            raise ConfigError(f"invalid jump size {l}: {_first_error(exc)}") from exc
    return spec.model_copy(update=update) if update else spec


def build_derivator(spec: DerivatorSpec) -> Derivator:
    """
    Turn a validated spec into a Derivator.

    Raises:
        ConfigError: malformed breakpoint or jump entries
        DomainError: the derivator violates the window conditions
    """
    T = spec.horizon
    c = spec.continuous
    try:
        if c.kind == "identity":
            cont = ContinuousPart.identity(T)
        elif c.kind == "staircase_saw":
            cont = ContinuousPart.staircase_saw(T)
        else:
            bps = [(float(t), float(slope)) for t, slope in c.params["breakpoints"]]
            cont = ContinuousPart.piecewise_linear(bps, T)
        if isinstance(spec.jumps, PeriodicJumps):
            jumps = JumpSet.periodic(spec.jumps.period, spec.jumps.size, T)
        else:
            jumps = JumpSet.from_pairs(spec.jumps)
        d = Derivator(cont, jumps, horizon=T)
    except DomainError:
        raise
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"invalid derivator parameters: {exc}") from exc
    return d


# ============================================================
# HELPERS
# ============================================================

def _strip_meta(data: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in data.items() if not str(k).startswith("_")}


def _first_error(exc: ValidationError) -> str:
    err = exc.errors()[0]
    loc = ".".join(str(x) for x in err.get("loc", ()))
    return f"{loc}: {err.get('msg')}" if loc else str(err.get("msg"))


def _reference(data: Dict[str, Any], name: str) -> Dict[float, float]:
    hs, errs = data.get("h", []), data.get("e_h", [])
    if len(hs) != len(errs):
        raise ConfigError(f"preset '{name}': reference h and e_h lists differ in length")
    return {float(h): float(e) for h, e in zip(hs, errs)}
