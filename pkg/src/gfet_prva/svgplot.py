"""Minimal SVG charts: bar histograms and log-log line plots with error bars."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

W, H = 640, 420
ML, MR, MT, MB = 70, 20, 40, 55


class _Canvas:
    def __init__(self, title):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
            'font-family="sans-serif" font-size="11">',
            f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
            f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        ]

    def add(self, s):
        self.parts.append(s)

    def text(self, x, y, s, anchor="middle", extra=""):
        self.add(f'<text x="{x:.1f}" y="{y:.1f}" text-anchor="{anchor}" {extra}>{escape(s)}</text>')

    def line(self, x1, y1, x2, y2, stroke="#000", width=1.0):
        self.add(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" stroke="{stroke}" stroke-width="{width}"/>')

    def render(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _nice_ticks(lo, hi, count=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    step = 10 ** math.floor(math.log10(span / count))
    for m in (1, 2, 5, 10):
        if span / (step * m) <= count:
            step *= m
            break
    start = math.ceil(lo / step) * step
    return list(np.arange(start, hi + step * 1e-9, step))


def _frame(cv, xlabel, ylabel):
    x0, x1, y0, y1 = ML, W - MR, H - MB, MT
    cv.line(x0, y0, x1, y0)
    cv.line(x0, y0, x0, y1)
    cv.text((x0 + x1) / 2, H - 15, xlabel)
    cv.text(18, (y0 + y1) / 2, ylabel, extra=f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})"')


def histogram_svg(hist, title="", xlabel="value", ylabel="count", overlay=None) -> str:
    """Bar chart of a :class:`~gfet_prva.stats.Histogram`.

    ``overlay`` is an optional array of expected counts per bin drawn as a line.
    """
    edges = hist.bin_edges
    counts = np.asarray(hist.counts, dtype=float)
    ymax = max(counts.max(), 0 if overlay is None else np.max(overlay)) or 1.0
    cv = _Canvas(title)
    _frame(cv, xlabel, ylabel)
    sx = lambda v: ML + (v - edges[0]) / (edges[-1] - edges[0]) * (W - ML - MR)
    sy = lambda v: H - MB - v / (ymax * 1.05) * (H - MB - MT)
    for lo, hi, c in zip(edges[:-1], edges[1:], counts):
        x, w = sx(lo), sx(hi) - sx(lo)
        cv.add(f'<rect x="{x:.2f}" y="{sy(c):.2f}" width="{max(w - 0.5, 0.5):.2f}" '
               f'height="{H - MB - sy(c):.2f}" fill="{PALETTE[0]}"/>')
    if overlay is not None:
        pts = " ".join(f"{sx(c):.2f},{sy(v):.2f}" for c, v in zip(hist.centers, overlay))
        cv.add(f'<polyline points="{pts}" fill="none" stroke="{PALETTE[1]}" stroke-width="1.5"/>')
    for t in _nice_ticks(edges[0], edges[-1]):
        cv.line(sx(t), H - MB, sx(t), H - MB + 4)
        cv.text(sx(t), H - MB + 16, f"{t:.3g}")
    for t in _nice_ticks(0, ymax):
        cv.line(ML - 4, sy(t), ML, sy(t))
        cv.text(ML - 6, sy(t) + 4, f"{t:.3g}", anchor="end")
    return cv.render()


def loglog_svg(series, title="", xlabel="N", ylabel="") -> str:
    """Log-log plot.  ``series`` maps a label to ``(x, y)`` or ``(x, y, yerr)``."""
    xs, ys = [], []
    for data in series.values():
        x, y = np.asarray(data[0], float), np.asarray(data[1], float)
        ok = (x > 0) & (y > 0)
        xs.extend(x[ok])
        ys.extend(y[ok])
    if not xs:
        raise ValueError("nothing positive to plot on log axes")
    lx0, lx1 = math.floor(math.log10(min(xs))), math.ceil(math.log10(max(xs)))
    ly0, ly1 = math.floor(math.log10(min(ys))), math.ceil(math.log10(max(ys)))
    lx1 = max(lx1, lx0 + 1)
    ly1 = max(ly1, ly0 + 1)
    sx = lambda v: ML + (math.log10(v) - lx0) / (lx1 - lx0) * (W - ML - MR - 120)
    sy = lambda v: H - MB - (math.log10(v) - ly0) / (ly1 - ly0) * (H - MB - MT)
    cv = _Canvas(title)
    _frame(cv, xlabel, ylabel)
    for e in range(lx0, lx1 + 1):
        cv.line(sx(10**e), H - MB, sx(10**e), H - MB + 4)
        cv.text(sx(10**e), H - MB + 16, f"1e{e}")
    for e in range(ly0, ly1 + 1):
        cv.line(ML - 4, sy(10**e), ML, sy(10**e))
        cv.line(ML, sy(10**e), W - MR - 120, sy(10**e), stroke="#ddd", width=0.5)
        cv.text(ML - 6, sy(10**e) + 4, f"1e{e}", anchor="end")
    for k, (label, data) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        x, y = np.asarray(data[0], float), np.asarray(data[1], float)
        err = np.asarray(data[2], float) if len(data) > 2 else None
        ok = (x > 0) & (y > 0)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[ok], y[ok]))
        cv.add(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for i in np.flatnonzero(ok):
            cv.add(f'<circle cx="{sx(x[i]):.2f}" cy="{sy(y[i]):.2f}" r="2.5" fill="{color}"/>')
            if err is not None and err[i] > 0:
                top = y[i] + err[i]
                bot = max(y[i] - err[i], 10**ly0)
                cv.line(sx(x[i]), sy(top), sx(x[i]), sy(bot), stroke=color)
        ly = MT + 14 + 16 * k
        cv.line(W - MR - 110, ly - 4, W - MR - 90, ly - 4, stroke=color, width=2)
        cv.text(W - MR - 86, ly, label, anchor="start")
    return cv.render()


def line_svg(series, title="", xlabel="", ylabel="", logy=False) -> str:
    """Linear-x line plot; ``series`` maps a label to ``(x, y)``."""
    xs = np.concatenate([np.asarray(d[0], float) for d in series.values()])
    ys = np.concatenate([np.asarray(d[1], float) for d in series.values()])
    if logy:
        ys = np.log10(ys[ys > 0])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if y1 <= y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    plot_w = W - ML - MR - 120
    sx = lambda v: ML + (v - x0) / (x1 - x0) * plot_w
    sy = lambda v: H - MB - (v - y0) / (y1 - y0) * (H - MB - MT)
    cv = _Canvas(title)
    _frame(cv, xlabel, ylabel)
    for t in _nice_ticks(x0, x1):
        cv.line(sx(t), H - MB, sx(t), H - MB + 4)
        cv.text(sx(t), H - MB + 16, f"{t:.3g}")
    for t in _nice_ticks(y0, y1):
        cv.line(ML - 4, sy(t), ML, sy(t))
        cv.text(ML - 6, sy(t) + 4, f"1e{t:.2g}" if logy else f"{t:.3g}", anchor="end")
    for k, (label, (x, y)) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        y = np.asarray(y, float)
        if logy:
            y = np.log10(np.where(y > 0, y, np.nan))
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y) if np.isfinite(b))
        cv.add(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = MT + 14 + 16 * k
        cv.line(W - MR - 110, ly - 4, W - MR - 90, ly - 4, stroke=color, width=2)
        cv.text(W - MR - 86, ly, label, anchor="start")
    return cv.render()
