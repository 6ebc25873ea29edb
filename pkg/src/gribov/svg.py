"""Minimal SVG line plots: axes, ticks and one polyline per series."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = 60
COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + k * step for k in range(count)]


def _fmt(v):
    return f"{v:.4g}"


def line_plot(x, series, title="", xlabel="", ylabel="") -> str:
    """Render ``series`` (a mapping ``label -> y values``) against ``x``.

    Non-finite points are skipped.  Output is deterministic text.
    """
    pts = [(float(a), float(b)) for ys in series.values() for a, b in zip(x, ys)
           if math.isfinite(float(a)) and math.isfinite(float(b))]
    if not pts:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    xmin, xmax = min(p[0] for p in pts), max(p[0] for p in pts)
    ymin, ymax = min(p[1] for p in pts), max(p[1] for p in pts)
    if xmax == xmin:
        xmax = xmin + 1.0
    if ymax == ymin:
        ymax = ymin + 1.0
    pw, ph = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def sx(v):
        return MARGIN + (v - xmin) / (xmax - xmin) * pw

    def sy(v):
        return HEIGHT - MARGIN - (v - ymin) / (ymax - ymin) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
    ]
    for t in _ticks(xmin, xmax):
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{HEIGHT - MARGIN}" x2="{px:.2f}" y2="{HEIGHT - MARGIN + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{HEIGHT - MARGIN + 18}" font-size="11" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(ymin, ymax):
        py = sy(t)
        out.append(f'<line x1="{MARGIN - 5}" y1="{py:.2f}" x2="{MARGIN}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN - 8}" y="{py + 4:.2f}" font-size="11" text-anchor="end">{_fmt(t)}</text>')
    for idx, (label, ys) in enumerate(series.items()):
        colour = COLOURS[idx % len(COLOURS)]
        coords = " ".join(f"{sx(float(a)):.2f},{sy(float(b)):.2f}" for a, b in zip(x, ys)
                          if math.isfinite(float(a)) and math.isfinite(float(b)))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{coords}"/>')
        out.append(f'<text x="{WIDTH - MARGIN}" y="{MARGIN + 14 * idx}" font-size="11" fill="{colour}" '
                   f'text-anchor="end">{escape(str(label))}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2:.0f}" y="{MARGIN / 2:.0f}" font-size="14" text-anchor="middle">{escape(title)}</text>')
    if xlabel:
        out.append(f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 15}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="15" y="{HEIGHT / 2:.0f}" font-size="12" text-anchor="middle" '
                   f'transform="rotate(-90 15 {HEIGHT / 2:.0f})">{escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
