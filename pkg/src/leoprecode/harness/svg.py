"""Minimal hand-written SVG line plots (no plotting dependency).

Coordinates are printed with fixed precision so identical data always
yields identical bytes.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
           "#17becf")
WIDTH, HEIGHT = 720, 450
MARGIN = dict(left=70, right=170, top=40, bottom=55)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, count: int = 6) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / (count - 1)
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + step * 1e-9, step)


def line_plot(x, series: dict[str, Sequence[float]], *, title: str, xlabel: str, ylabel: str,
              errors: dict[str, Sequence[float]] | None = None,
              vlines: Sequence[tuple[float, str, str]] = ()) -> str:
    """Render ``series`` (label -> y values over ``x``) as an SVG document string.

    ``errors`` adds symmetric error bars per series; ``vlines`` draws vertical
    markers as ``(x, label, dash_style)`` with dash_style ``"solid"`` or ``"dashed"``.
    """
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    errors = {k: np.asarray(v, dtype=float) for k, v in (errors or {}).items()}
    lows = [y - errors.get(k, 0) for k, y in ys.items()]
    highs = [y + errors.get(k, 0) for k, y in ys.items()]
    y_lo = min(float(np.min(v)) for v in lows) if lows else 0.0
    y_hi = max(float(np.max(v)) for v in highs) if highs else 1.0
    pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    x_lo, x_hi = float(x.min()), float(x.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5

    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return MARGIN["top"] + (y_hi - v) / (y_hi - y_lo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH / 2 - MARGIN["right"] / 2:.0f}" y="22" text-anchor="middle" '
           f'font-size="14">{escape(title)}</text>',
           f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
           f'fill="none" stroke="black"/>']
    for t in _ticks(x_lo, x_hi):
        out.append(f'<line x1="{_fmt(px(t))}" y1="{MARGIN["top"] + ph}" x2="{_fmt(px(t))}" '
                   f'y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px(t))}" y="{MARGIN["top"] + ph + 18}" '
                   f'text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{_fmt(py(t))}" x2="{MARGIN["left"]}" '
                   f'y2="{_fmt(py(t))}" stroke="black"/>')
        out.append(f'<line x1="{MARGIN["left"]}" y1="{_fmt(py(t))}" x2="{MARGIN["left"] + pw}" '
                   f'y2="{_fmt(py(t))}" stroke="#e0e0e0"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{_fmt(py(t) + 4)}" '
                   f'text-anchor="end">{t:.4g}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.0f}" y="{HEIGHT - 12}" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{MARGIN["top"] + ph / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {MARGIN["top"] + ph / 2:.0f})">{escape(ylabel)}</text>')

    for xv, label, style in vlines:
        dash = ' stroke-dasharray="5,4"' if style == "dashed" else ""
        out.append(f'<line x1="{_fmt(px(xv))}" y1="{MARGIN["top"]}" x2="{_fmt(px(xv))}" '
                   f'y2="{MARGIN["top"] + ph}" stroke="#555"{dash}><title>{escape(label)}</title>'
                   f'</line>')

    for i, (label, y) in enumerate(ys.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{pts}"/>')
        if label in errors:
            for a, b, e in zip(x, y, errors[label]):
                out.append(f'<line x1="{_fmt(px(a))}" y1="{_fmt(py(b - e))}" x2="{_fmt(px(a))}" '
                           f'y2="{_fmt(py(b + e))}" stroke="{color}"/>')
        ly = MARGIN["top"] + 16 + 18 * i
        lx = MARGIN["left"] + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
