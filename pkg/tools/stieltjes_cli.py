"""
Stieltjes calculus command line

Usage examples:
  python -m tools.stieltjes_cli converge --preset table1
  python -m tools.stieltjes_cli oscillator --preset example1-g2 --zeta 0.5 --l 0.3333333333333333 --svg
  python -m tools.stieltjes_cli exp --derivator data_push/gremark.derivator --beta 0

Writes <command>.csv (and <command>.svg with --svg) plus <command>.meta.json
into --output-dir. Exit codes: 0 ok, 1 config error, 2 domain/solver error,
3 accuracy error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.api.models import Command, RunConfig
from app.api.runner import EXIT_CONFIG, run
from app.src.errors import ConfigError

logger = logging.getLogger("stieltjes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Closed-form Stieltjes differential equations and the trapezoidal scheme")
    parser.add_argument("command", choices=[c.value for c in Command], help="what to compute")

    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--derivator", dest="derivator_file", help="path to a .derivator file")
    source.add_argument("--preset", help="named preset from data_push/presets.json")

    for name in ("omega0", "zeta", "x0", "v0", "P", "Q", "source", "T", "l"):
        parser.add_argument(f"--{name}", type=float, default=None)
    parser.add_argument("--beta", dest="beta_re", type=float, default=None, help="real part of beta")
    parser.add_argument("--beta-im", dest="beta_im", type=float, default=None, help="imaginary part of beta")
    parser.add_argument("--h", type=float, nargs="+", default=None, help="grid spacings for converge")
    parser.add_argument("--l-sweep", dest="l_sweep", type=float, nargs="+", default=None,
                        help="jump sizes to sweep; one CSV per value")
    parser.add_argument("--points", dest="n_points", type=int, default=401, help="uniform samples on [0, T]")
    parser.add_argument("--output-dir", default="out")
    parser.add_argument("--svg", dest="emit_svg", action="store_true", help="also write an SVG plot")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if k != "log_level" and v is not None}
    try:
        return RunConfig.model_validate(fields)
    except ValidationError as exc:
        err = exc.errors()[0]
        raise ConfigError(f"invalid arguments: {err.get('msg')}") from exc


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")

    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    summary = run(config)
    if summary.exit_code != 0:
        print(f"error: {summary.message}", file=sys.stderr)
        return summary.exit_code
    for path in summary.files:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
