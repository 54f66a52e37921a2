"""
Run orchestration for the command-line surface.

PURPOSE:
Turn a validated RunConfig into solver calls and output files, and map every
failure to an exit code.

WHAT IT DOES:
1. Resolves the derivator (file or preset) and merges preset parameters
2. Dispatches one of the seven commands to the numerical core in app/src
3. Writes <command>.csv, <command>.meta.json and optionally <command>.svg
4. With l_sweep, evaluates one scenario per jump size in a thread pool

EXIT CODES:
  0  success
  1  configuration error (bad file, preset or parameter)
  2  domain or solver error (window conditions, vanishing factors, divergence)
  3  quadrature accuracy error

`sincos` reports exp_g(i omega0; 0, t): `value` is cos_g and `value_im` is sin_g.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from app.src.derivator import Derivator
from app.src.errors import AccuracyError, ConfigError, StieltjesError
from app.src.first_order import g_exp, g_sin_cos, solve_first_order
from app.src.oscillator import OscillatorSpec, solve_oscillator, solve_resonance
from app.src.scheme import convergence_study, oscillator_rhs
from app.src.second_order import SecondOrderProblem, solve_nonhomogeneous
from app.src.stieltjes_integral import DEFAULT_QUADRATURE, QuadratureSettings
from app.src.trajectory import Trajectory, sample

from .config import build_derivator, load_derivator_file, load_preset, with_overrides
from .models import REQUIRED_PARAMETERS, Command, DerivatorSpec, RunConfig, RunSummary
from .output import write_csv, write_meta, write_svg

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "STIELTJES_OUTPUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DOMAIN = 2
EXIT_ACCURACY = 3

MAX_SWEEP_WORKERS = 8


@dataclass(frozen=True)
class ResolvedRun:
    derivator: DerivatorSpec
    parameters: Dict[str, Any]
    reference_errors: Dict[float, float]


# ============================================================
# RESOLUTION
# ============================================================

def resolve(config: RunConfig) -> ResolvedRun:
    """
    Derivator spec plus merged parameters.

    Preset parameters are defaults; anything set on the config wins.
    T and l are applied to the derivator spec (l needs periodic jumps).

    Raises:
        ConfigError: unreadable file, unknown preset or a missing required parameter
    """
    reference: Dict[float, float] = {}
    params: Dict[str, Any] = {}
    if config.preset is not None:
        preset = load_preset(config.preset)
        spec = preset.derivator
        params.update(preset.parameters)
        reference = preset.reference_errors
    else:
        spec = load_derivator_file(config.derivator_file)
    params.update(config.parameters())

    try:
        T = _optional_float(params.pop("T", None))
        l = _optional_float(params.pop("l", None))
        for key, value in list(params.items()):
            params[key] = [float(v) for v in value] if key == "h" else float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"non-numeric parameter: {exc}") from exc
    spec = with_overrides(spec, T=T, l=l)

    missing = [k for k in REQUIRED_PARAMETERS[config.command] if params.get(k) in (None, [])]
    if missing:
        raise ConfigError(f"command '{config.command.value}' needs parameter(s): {', '.join(missing)}")
    return ResolvedRun(derivator=spec, parameters=params, reference_errors=reference)


def _optional_float(value: Any) -> Optional[float]:
    return None if value is None else float(value)


# ============================================================
# COMMANDS
# ============================================================

def _trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    return traj.to_frame(real_output=traj.is_real)


def evaluate(
    command: Command,
    d: Derivator,
    params: Dict[str, Any],
    n_points: int = 401,
    reference_errors: Optional[Dict[float, float]] = None,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> pd.DataFrame:
    """Run one command on one derivator and return its output table."""
    x0 = params.get("x0", 1.0)
    v0 = params.get("v0", 0.0)

    if command is Command.EXP:
        e = g_exp(d, complex(params["beta_re"], params.get("beta_im", 0.0)), q=q)
        return _trajectory_frame(sample(d, e, n_points, right=e.value_right))

    if command is Command.SINCOS:
        sc = g_sin_cos(d, params["omega0"], q=q)
        return sample(d, sc.exp, n_points, right=sc.exp.value_right).to_frame()

    if command is Command.SOLVE1:
        beta = complex(params["beta_re"], params.get("beta_im", 0.0))
        source = params.get("source") or None
        return _trajectory_frame(solve_first_order(d, beta, f=source, v0=x0, q=q).trajectory(n_points))

    if command is Command.SOLVE2:
        source = params.get("source")
        f = None if not source else (lambda t, c=source: c)
        prob = SecondOrderProblem(P=params["P"], Q=params["Q"], x0=x0, v0=v0, f=f)
        return _trajectory_frame(solve_nonhomogeneous(d, prob, q).trajectory(n_points))

    if command is Command.OSCILLATOR:
        spec = OscillatorSpec(params["omega0"], params["zeta"], x0, v0, d)
        return solve_oscillator(spec, q).trajectory(n_points).to_frame(real_output=True)

    if command is Command.RESONANCE:
        spec = OscillatorSpec(params["omega0"], 0.0, x0, v0, d)
        return solve_resonance(spec, q).trajectory(n_points).to_frame(real_output=True)

    if command is Command.CONVERGE:
        omega0 = params["omega0"]
        exact = solve_resonance(OscillatorSpec(omega0, 0.0, x0, v0, d), q)
        study = convergence_study(d, oscillator_rhs(d, omega0, q), (v0, x0), exact, params["h"], component=1)
        frame = study.to_frame()
        if reference_errors:
            frame["e_ref"] = [reference_errors.get(h, np.nan) for h in frame["h"]]
        logger.info("convergence slope %.4f over %d spacings", study.slope, len(frame))
        return frame

    raise ConfigError(f"unknown command {command}")


def _svg(path: Path, command: Command, frame: pd.DataFrame, title: str) -> Path:
    if command is Command.CONVERGE:
        series = {"e_h": frame["e_h"].to_numpy()}
        if "e_ref" in frame:
            series["e_ref"] = frame["e_ref"].to_numpy()
        return write_svg(path, frame["h"].to_numpy(), series, title=title, x_label="h", log_log=True)
    series = {"value": frame["value"].to_numpy()}
    if "value_im" in frame:
        series["value_im"] = frame["value_im"].to_numpy()
    return write_svg(path, frame["t"].to_numpy(), series, title=title)


# ============================================================
# ENTRY POINT
# ============================================================

def output_dir(config: RunConfig) -> Path:
    override = os.environ.get(OUTPUT_DIR_ENV)
    return Path(override) if override else config.output_dir


def _execute(config: RunConfig) -> Tuple[List[Path], int]:
    resolved = resolve(config)
    out = output_dir(config)
    command = config.command
    files: List[Path] = []
    rows = 0

    def one(l: Optional[float]) -> pd.DataFrame:
        spec = resolved.derivator if l is None else with_overrides(resolved.derivator, l=l)
        return evaluate(command, build_derivator(spec), resolved.parameters, config.n_points,
                        resolved.reference_errors)

    if config.l_sweep:
        with ThreadPoolExecutor(max_workers=min(len(config.l_sweep), MAX_SWEEP_WORKERS)) as pool:
            frames = list(pool.map(one, config.l_sweep))
        for l, frame in zip(config.l_sweep, frames):
            stem = f"{command.value}_l{l:.6g}"
            files.append(write_csv(frame, out / f"{stem}.csv"))
            if config.emit_svg:
                files.append(_svg(out / f"{stem}.svg", command, frame, title=f"{command.value}, l = {l:.6g}"))
            rows += len(frame)
    else:
        frame = one(None)
        files.append(write_csv(frame, out / f"{command.value}.csv"))
        if config.emit_svg:
            files.append(_svg(out / f"{command.value}.svg", command, frame, title=command.value))
        rows = len(frame)

    meta_params = dict(resolved.parameters)
    meta_params["T"] = resolved.derivator.horizon
    files.append(write_meta(
        out / f"{command.value}.meta.json",
        command.value,
        meta_params,
        files,
        derivator=resolved.derivator.model_dump(mode="json"),
        preset=config.preset,
        l_sweep=list(config.l_sweep),
    ))
    return files, rows


def exit_code_for(exc: StieltjesError) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, AccuracyError):
        return EXIT_ACCURACY
    # DomainError, DivergenceError and anything else raised by a solver
    return EXIT_DOMAIN


def run(config: RunConfig) -> RunSummary:
    """
    Execute one run.

    Returns:
        RunSummary with the exit code and the files written; on failure the
        message names the failing module.
    """
    logger.info("run %s (preset=%s, file=%s)", config.command.value, config.preset, config.derivator_file)
    try:
        files, rows = _execute(config)
    except StieltjesError as exc:
        code = exit_code_for(exc)
        logger.error("%s failed (exit %d): %s", config.command.value, code, exc)
        return RunSummary(command=config.command, exit_code=code, message=str(exc))
    return RunSummary(command=config.command, exit_code=EXIT_OK, files=files, rows=rows)
