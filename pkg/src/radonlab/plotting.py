"""Self-contained log-log scatter plots as plain-text SVG (no renderer)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 70, 20, 30, 50


@dataclass(frozen=True)
class LogLogPlot:
    svg: str
    slope: float | None
    dropped: int


def _fit(xs, ys):
    lx, ly = np.log2(xs), np.log2(ys)
    if lx.size < 2 or np.allclose(lx, lx[0]):
        return None, None
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


def _ticks(lo: float, hi: float) -> list[float]:
    lo_i, hi_i = math.floor(lo), math.ceil(hi)
    step = max(1, (hi_i - lo_i) // 6)
    return [float(v) for v in range(lo_i, hi_i + 1, step)]


def plot_loglog(series, title: str = "", x_label: str = "eps",
                y_label: str = "value", fit: bool = True) -> LogLogPlot:
    """Scatter of (x, y) pairs on log2 axes with an optional least-squares fit
    line and a slope annotation; nonpositive points are dropped and counted."""
    pts = [(float(x), float(y)) for x, y in series]
    kept = [(x, y) for x, y in pts if x > 0 and y > 0]
    dropped = len(pts) - len(kept)

    head = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{title}</text>',
    ]
    if not kept:
        head.append(
            f'<text x="{_W / 2:.1f}" y="{_H / 2:.1f}" text-anchor="middle" '
            f'font-family="monospace" font-size="13">no positive data '
            f'({dropped} dropped)</text>')
        head.append("</svg>")
        return LogLogPlot("\n".join(head), None, dropped)

    xs = np.array([p[0] for p in kept])
    ys = np.array([p[1] for p in kept])
    lx, ly = np.log2(xs), np.log2(ys)
    x_lo, x_hi = float(lx.min()), float(lx.max())
    y_lo, y_hi = float(ly.min()), float(ly.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1, y_hi + 1
    pad_x = 0.06 * (x_hi - x_lo)
    pad_y = 0.08 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - pad_x, x_hi + pad_x
    y_lo, y_hi = y_lo - pad_y, y_hi + pad_y

    def sx(v):
        return _ML + (v - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(v):
        return _H - _MB - (v - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    body = [
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
        f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>'
    ]
    for tv in _ticks(x_lo, x_hi):
        if x_lo <= tv <= x_hi:
            body.append(f'<line x1="{sx(tv):.1f}" y1="{_H - _MB}" x2="{sx(tv):.1f}" '
                        f'y2="{_H - _MB + 5}" stroke="black"/>')
            body.append(f'<text x="{sx(tv):.1f}" y="{_H - _MB + 18}" text-anchor="middle" '
                        f'font-family="monospace" font-size="11">2^{tv:g}</text>')
    for tv in _ticks(y_lo, y_hi):
        if y_lo <= tv <= y_hi:
            body.append(f'<line x1="{_ML - 5}" y1="{sy(tv):.1f}" x2="{_ML}" '
                        f'y2="{sy(tv):.1f}" stroke="black"/>')
            body.append(f'<text x="{_ML - 8}" y="{sy(tv):.1f}" text-anchor="end" '
                        f'font-family="monospace" font-size="11">2^{tv:g}</text>')
    body.append(f'<text x="{_W / 2:.1f}" y="{_H - 12}" text-anchor="middle" '
                f'font-family="monospace" font-size="12">log2 {x_label}</text>')
    body.append(f'<text x="16" y="{_H / 2:.1f}" text-anchor="middle" '
                f'font-family="monospace" font-size="12" '
                f'transform="rotate(-90 16 {_H / 2:.1f})">log2 {y_label}</text>')

    slope = None
    if fit:
        slope, intercept = _fit(xs, ys)
        if slope is not None:
            y0, y1 = slope * (x_lo + pad_x) + intercept, slope * (x_hi - pad_x) + intercept
            body.append(f'<line x1="{sx(x_lo + pad_x):.1f}" y1="{sy(y0):.1f}" '
                        f'x2="{sx(x_hi - pad_x):.1f}" y2="{sy(y1):.1f}" '
                        f'stroke="steelblue" stroke-width="1.5"/>')
            body.append(f'<text x="{_W - _MR - 10}" y="{_MT + 18}" text-anchor="end" '
                        f'font-family="monospace" font-size="13" fill="steelblue">'
                        f'slope {slope:.3f}</text>')
    for x, y in zip(lx, ly):
        body.append(f'<circle cx="{sx(float(x)):.1f}" cy="{sy(float(y)):.1f}" '
                    f'r="3.5" fill="crimson"/>')
    if dropped:
        body.append(f'<text x="{_ML + 6}" y="{_MT + 16}" font-family="monospace" '
                    f'font-size="11" fill="gray">{dropped} nonpositive dropped</text>')
    return LogLogPlot("\n".join(head + body + ["</svg>"]), slope, dropped)
