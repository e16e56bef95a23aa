"""Hand-rolled SVG line charts; no plotting dependency.

One polyline per series, simple axes with min/max tick labels, output
is plain well-formed XML.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_chart", "save_chart"]

WIDTH = 640
HEIGHT = 400
MARGIN_L = 64
MARGIN_R = 16
MARGIN_T = 32
MARGIN_B = 44
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


def _span(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo < 1e-12:
        pad = max(abs(hi), 1.0) * 0.05
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def line_chart(series, title: str = "", x_label: str = "",
               y_label: str = "") -> str:
    """series: iterable of (label, x values, y values) triples."""
    series = [(str(label), np.asarray(x, dtype=np.float64),
               np.asarray(y, dtype=np.float64)) for label, x, y in series]
    if not series:
        raise ValueError("need at least one series")
    for label, x, y in series:
        if x.size != y.size or x.size < 2:
            raise ValueError(f"series {label!r} needs >= 2 equal-length samples")

    x_lo, x_hi = _span(min(float(x.min()) for _, x, _ in series),
                       max(float(x.max()) for _, x, _ in series))
    y_lo, y_hi = _span(min(float(y.min()) for _, _, y in series),
                       max(float(y.max()) for _, _, y in series))
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v):
        return MARGIN_T + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#888"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{escape(title)}</text>')
    if x_label:
        parts.append(
            f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{HEIGHT - 10}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">'
            f'{escape(x_label)}</text>')
    if y_label:
        cx, cy = 16, MARGIN_T + plot_h / 2
        parts.append(
            f'<text x="{cx}" y="{cy:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 {cx} {cy:.1f})">{escape(y_label)}</text>')
    for value, anchor, xpos in ((x_lo, "start", MARGIN_L),
                                (x_hi, "end", MARGIN_L + plot_w)):
        parts.append(
            f'<text x="{xpos}" y="{MARGIN_T + plot_h + 16}" '
            f'text-anchor="{anchor}" font-family="sans-serif" font-size="11">'
            f'{value:.3g}</text>')
    for value, ypos in ((y_lo, MARGIN_T + plot_h), (y_hi, MARGIN_T + 4)):
        parts.append(
            f'<text x="{MARGIN_L - 6}" y="{ypos:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{value:.3g}</text>')
    if y_lo < 0.0 < y_hi:
        zero_y = sy(0.0)
        parts.append(
            f'<line x1="{MARGIN_L}" y1="{zero_y:.2f}" '
            f'x2="{MARGIN_L + plot_w}" y2="{zero_y:.2f}" stroke="#ccc" '
            f'stroke-dasharray="4 3"/>')

    for i, (label, x, y) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        points = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{points}"/>')
        ly = MARGIN_T + 14 + 16 * i
        lx = MARGIN_L + plot_w - 150
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def save_chart(path, series, title: str = "", x_label: str = "",
               y_label: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(line_chart(series, title=title, x_label=x_label,
                            y_label=y_label))
