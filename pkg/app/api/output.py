"""
Output writers: CSV tables, the sidecar metadata file and SVG line plots.

CSV files hold data only and are byte-for-byte deterministic for a given
config; run metadata (timestamps, parameters) goes to <command>.meta.json.
"""

from __future__ import annotations

import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"

SVG_WIDTH = 720
SVG_HEIGHT = 420
SVG_MARGIN = 48
SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    logger.info("wrote %s (%d rows)", path, len(frame))
    return path


def write_meta(path: Path, command: str, parameters: Dict[str, Any], files: Sequence[Path], **extra: Any) -> Path:
    payload = {
        "command": command,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "parameters": parameters,
        "files": [p.name for p in files],
        **extra,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


# ============================================================
# SVG
# ============================================================

def _bounds(values: np.ndarray) -> Tuple[float, float]:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return 0.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    if hi - lo < 1e-300:
        pad = max(abs(lo), 1.0) * 0.5
        return lo - pad, hi + pad
    return lo, hi


def _polylines(xs: np.ndarray, ys: np.ndarray) -> List[List[Tuple[float, float]]]:
    """Split at non-finite points; consecutive rows with equal x draw a vertical jump."""
    runs: List[List[Tuple[float, float]]] = []
    current: List[Tuple[float, float]] = []
    for x, y in zip(xs, ys):
        if math.isfinite(x) and math.isfinite(y):
            current.append((x, y))
        elif current:
            runs.append(current)
            current = []
    if current:
        runs.append(current)
    return runs


def write_svg(
    path: Path,
    x: np.ndarray,
    series: Dict[str, np.ndarray],
    title: str = "",
    x_label: str = "t",
    log_log: bool = False,
) -> Path:
    """
    Static line plot of one or more series against x.

    Rows sharing the same x (pre/post values at a jump time) are joined by a
    vertical segment, which is how jumps are drawn.
    """
    x = np.asarray(x, dtype=float)
    ys = {name: np.asarray(v, dtype=float) for name, v in series.items()}
    if log_log:
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.where(x > 0, np.log10(x), np.nan)
            ys = {k: np.where(v > 0, np.log10(v), np.nan) for k, v in ys.items()}

    x_lo, x_hi = _bounds(x)
    y_lo, y_hi = _bounds(np.concatenate(list(ys.values())) if ys else np.array([]))
    inner_w = SVG_WIDTH - 2 * SVG_MARGIN
    inner_h = SVG_HEIGHT - 2 * SVG_MARGIN

    def sx(v: float) -> float:
        return SVG_MARGIN + (v - x_lo) / (x_hi - x_lo) * inner_w

    def sy(v: float) -> float:
        return SVG_HEIGHT - SVG_MARGIN - (v - y_lo) / (y_hi - y_lo) * inner_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{SVG_MARGIN}" y1="{SVG_HEIGHT - SVG_MARGIN}" x2="{SVG_WIDTH - SVG_MARGIN}" '
        f'y2="{SVG_HEIGHT - SVG_MARGIN}" stroke="black"/>',
        f'<line x1="{SVG_MARGIN}" y1="{SVG_MARGIN}" x2="{SVG_MARGIN}" y2="{SVG_HEIGHT - SVG_MARGIN}" stroke="black"/>',
    ]
    if title:
        parts.append(f'<text x="{SVG_WIDTH / 2:.1f}" y="{SVG_MARGIN / 2:.1f}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="14">{escape(title)}</text>')
    prefix = "log10 " if log_log else ""
    parts.append(f'<text x="{SVG_WIDTH / 2:.1f}" y="{SVG_HEIGHT - 12}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">{escape(prefix + x_label)}</text>')
    for value, xpos in ((x_lo, SVG_MARGIN), (x_hi, SVG_WIDTH - SVG_MARGIN)):
        parts.append(f'<text x="{xpos}" y="{SVG_HEIGHT - SVG_MARGIN + 16}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="10">{value:.4g}</text>')
    for value, ypos in ((y_lo, SVG_HEIGHT - SVG_MARGIN), (y_hi, SVG_MARGIN)):
        parts.append(f'<text x="{SVG_MARGIN - 4}" y="{ypos}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="10">{value:.4g}</text>')

    for i, (name, y) in enumerate(ys.items()):
        color = SVG_COLORS[i % len(SVG_COLORS)]
        for run in _polylines(x, y):
            pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in run)
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{SVG_WIDTH - SVG_MARGIN}" y="{SVG_MARGIN + 14 * (i + 1)}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11" fill="{color}">{escape(prefix + name)}</text>')
    parts.append("</svg>")

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    logger.info("wrote %s", path)
    return path
