"""
Incidence drawings for PyShatter
SVG pictures of a configuration and its lines through three or more points
"""

import io
import logging
from typing import List, Optional, Tuple

import matplotlib
from matplotlib.figure import Figure

from core.incidence import PointConfig, lines_at_least

logger = logging.getLogger(__name__)


def _bounds(cfg: PointConfig) -> Tuple[float, float, float, float]:
    xs = [float(p.x) for p in cfg.points] or [0.0]
    ys = [float(p.y) for p in cfg.points] or [0.0]
    pad = max(1.0, 0.1 * max(max(xs) - min(xs), max(ys) - min(ys)))
    return min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad


def _segment(a: int, b: int, c: int, box: Tuple[float, float, float, float]) -> Optional[List[Tuple[float, float]]]:
    """Clip a x + b y = c to the drawing box"""
    x0, x1, y0, y1 = box
    if b != 0:
        return [(x, (c - a * x) / b) for x in (x0, x1)]
    if a != 0:
        return [(c / a, y) for y in (y0, y1)]
    return None


def render_svg(cfg: PointConfig, title: str = "", min_points: int = 3) -> str:
    """Points labeled by index, with every line carrying at least min_points of them"""
    figure = Figure(figsize=(6, 6))
    ax = figure.add_subplot(1, 1, 1)
    box = _bounds(cfg)
    for c in lines_at_least(cfg, min_points):
        segment = _segment(*c.line.coeffs(), box)
        if segment is not None:
            (xa, ya), (xb, yb) = segment
            ax.plot([xa, xb], [ya, yb], color='tab:blue', linewidth=1, alpha=0.7)
    ax.scatter([float(p.x) for p in cfg.points], [float(p.y) for p in cfg.points], color='black', zorder=3)
    for index, p in enumerate(cfg.points):
        ax.annotate(str(index), (float(p.x), float(p.y)), textcoords='offset points', xytext=(4, 4), fontsize=9)
    ax.set_xlim(box[0], box[1])
    ax.set_ylim(box[2], box[3])
    ax.set_aspect('equal')
    if title:
        ax.set_title(title)
    buffer = io.StringIO()
    # fixed salt, no date
    with matplotlib.rc_context({'svg.hashsalt': 'pyshatter'}):
        figure.savefig(buffer, format='svg', metadata={'Date': None})
    return buffer.getvalue()


def save_svg(cfg: PointConfig, path: str, title: str = ""):
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(render_svg(cfg, title))
    logger.info("Wrote incidence drawing of %d points to %s", cfg.n, path)
