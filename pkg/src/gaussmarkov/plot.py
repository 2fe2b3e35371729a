"""Minimal deterministic SVG rendering of a posterior table.

Draws the shaded credible band, the posterior mean, and optionally the true
path and the observations.  Output depends only on the inputs (fixed
coordinate precision, no timestamps or random ids), so files can be
compared byte for byte.
"""

from __future__ import annotations

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN = 50

BAND_FILL = "#cccccc"
PATH_STROKE = "#d62728"
MEAN_STROKE = "#000000"


def _nice_ticks(lo: float, hi: float, target: int = 5) -> np.ndarray:
    span = hi - lo
    raw = span / target
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 1e-9 * span, step)


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _label(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


def render_svg(x, mean, lo, hi, path_x=None, path_y=None, obs_x=None, obs_y=None,
               title: str | None = None) -> str:
    x, mean, lo, hi = (np.asarray(a, dtype=float) for a in (x, mean, lo, hi))
    ys = [mean, lo, hi]
    xs_all = [x]
    if path_x is not None:
        xs_all.append(np.asarray(path_x, dtype=float))
        ys.append(np.asarray(path_y, dtype=float))
    if obs_x is not None:
        xs_all.append(np.asarray(obs_x, dtype=float))
        ys.append(np.asarray(obs_y, dtype=float))
    allx = np.concatenate(xs_all) if any(a.size for a in xs_all) else np.array([0.0, 1.0])
    ally = np.concatenate(ys) if any(a.size for a in ys) else np.array([0.0, 1.0])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 <= x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 <= y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(v):
        return MARGIN + (np.asarray(v) - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)

    def py(v):
        return HEIGHT - MARGIN - (np.asarray(v) - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)

    def points(xv, yv):
        return " ".join(f"{_num(a)},{_num(b)}" for a, b in zip(px(xv), py(yv)))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-size="14">{title}</text>')

    # axes
    bottom, left = HEIGHT - MARGIN, MARGIN
    out.append(f'<g stroke="#000000" stroke-width="1" fill="none">'
               f'<path d="M{left},{MARGIN} V{bottom} H{WIDTH - MARGIN}"/></g>')
    out.append('<g font-size="11" fill="#000000">')
    for t in _nice_ticks(x0, x1):
        out.append(f'<text x="{_num(px(t))}" y="{bottom + 16}" text-anchor="middle">{_label(t)}</text>')
    for t in _nice_ticks(y0, y1):
        out.append(f'<text x="{left - 6}" y="{_num(py(t) + 4)}" text-anchor="end">{_label(t)}</text>')
    out.append("</g>")

    if x.size and np.any(hi > lo):
        ring = points(np.concatenate([x, x[::-1]]), np.concatenate([hi, lo[::-1]]))
        out.append(f'<polygon class="band" points="{ring}" fill="{BAND_FILL}" stroke="none"/>')
    if path_x is not None and np.size(path_x):
        out.append(f'<polyline class="path" points="{points(path_x, path_y)}" fill="none" '
                   f'stroke="{PATH_STROKE}" stroke-width="1"/>')
    if x.size:
        out.append(f'<polyline class="mean" points="{points(x, mean)}" fill="none" '
                   f'stroke="{MEAN_STROKE}" stroke-width="1.5"/>')
    if obs_x is not None and np.size(obs_x):
        out.append('<g class="obs" fill="#000000">')
        for a, b in zip(px(obs_x), py(obs_y)):
            out.append(f'<circle cx="{_num(a)}" cy="{_num(b)}" r="3"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
