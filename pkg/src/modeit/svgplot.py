"""Minimal static SVG line plots (no plotting dependency)."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 150, 40, 50
_MAX_POINTS = 2000


def _fmt(x: float) -> str:
    return f"{x:.4g}"


def line_plot(path, curves, title: str = "", xlabel: str = "", ylabel: str = "") -> Path:
    """Write ``curves`` (iterable of ``(label, x, y)``) as an SVG line chart."""
    curves = [(str(lbl), np.asarray(x, float), np.asarray(y, float)) for lbl, x, y in curves]
    xs = np.concatenate([c[1] for c in curves]) if curves else np.array([0.0, 1.0])
    ys = np.concatenate([c[2] for c in curves]) if curves else np.array([0.0, 1.0])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def sx(x):
        return _ML + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return _MT + ph - (y - y0) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" font-family="sans-serif" font-size="12">',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{_W / 2}" y="20" text-anchor="middle">{escape(title)}</text>',
        f'<text x="{_ML + pw / 2}" y="{_H - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{_MT + ph / 2}" transform="rotate(-90 15 {_MT + ph / 2})" text-anchor="middle">{escape(ylabel)}</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        parts.append(f'<text x="{sx(xv):.1f}" y="{_MT + ph + 16}" text-anchor="middle">{_fmt(xv)}</text>')
        parts.append(f'<text x="{_ML - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end">{_fmt(yv)}</text>')

    for i, (label, x, y) in enumerate(curves):
        stride = max(1, len(x) // _MAX_POINTS)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[::stride], y[::stride]))
        color = _COLORS[i % len(_COLORS)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = _MT + 14 + 16 * i
        parts.append(f'<line x1="{_W - _MR + 10}" y1="{ly - 4}" x2="{_W - _MR + 30}" y2="{ly - 4}" stroke="{color}"/>')
        parts.append(f'<text x="{_W - _MR + 34}" y="{ly}">{escape(label)}</text>')
    parts.append("</svg>\n")

    path = Path(path)
    path.write_text("\n".join(parts), encoding="utf-8", newline="\n")
    return path
