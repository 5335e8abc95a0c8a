"""Minimal SVG line/scatter charts with linear or log axes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

LEGEND_W = 190
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"]


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _tick_label(v: float) -> str:
    if v != 0 and (abs(v) >= 1e4 or abs(v) < 1e-3):
        return f"{v:.0e}".replace("e+0", "e").replace("e-0", "e-")
    return f"{v:.6g}"


def nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks, t = [], start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


@dataclass
class Layer:
    x: np.ndarray
    y: np.ndarray
    kind: str  # "line" or "points"
    color: str
    label: str | None = None
    dashed: bool = False


@dataclass
class Panel:
    title: str
    xlabel: str
    ylabel: str
    xlog: bool = False
    ylog: bool = False
    layers: list = field(default_factory=list)
    vlines: list = field(default_factory=list)

    def _add(self, x, y, kind, color, label, dashed):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        if self.xlog:
            ok &= x > 0
        if self.ylog:
            ok &= y > 0
        self.layers.append(Layer(x[ok], y[ok], kind, color, label, dashed))

    def line(self, x, y, color=PALETTE[0], label=None, dashed=False):
        self._add(x, y, "line", color, label, dashed)

    def points(self, x, y, color=PALETTE[0], label=None):
        self._add(x, y, "points", color, label, False)

    def vline(self, x, color="#888888"):
        self.vlines.append((float(x), color))

    def _bounds(self, axis):
        vals = [getattr(l, axis) for l in self.layers if len(getattr(l, axis))]
        log = self.xlog if axis == "x" else self.ylog
        if not vals:
            return (1.0, 10.0) if log else (0.0, 1.0)
        v = np.concatenate(vals)
        lo, hi = float(v.min()), float(v.max())
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.04 * (hi - lo)
        return lo - pad, hi + pad

    def render(self, ox: float, oy: float, w: float, h: float) -> list[str]:
        labelled = [l for l in self.layers if l.label]
        ml, mr, mt, mb = 62, (LEGEND_W if labelled else 12), 26, 42
        pw, ph = w - ml - mr, h - mt - mb
        x0, x1 = self._bounds("x")
        y0, y1 = self._bounds("y")

        def tx(v):
            v = np.log10(v) if self.xlog else v
            return ox + ml + (v - x0) / (x1 - x0) * pw

        def ty(v):
            v = np.log10(v) if self.ylog else v
            return oy + mt + ph - (v - y0) / (y1 - y0) * ph

        out = [f'<rect x="{_fmt(ox + ml)}" y="{_fmt(oy + mt)}" width="{_fmt(pw)}" height="{_fmt(ph)}" '
               f'fill="none" stroke="#333"/>',
               f'<text x="{_fmt(ox + ml + pw / 2)}" y="{_fmt(oy + 16)}" text-anchor="middle" '
               f'font-size="13">{escape(self.title)}</text>',
               f'<text x="{_fmt(ox + ml + pw / 2)}" y="{_fmt(oy + h - 6)}" text-anchor="middle" '
               f'font-size="11">{escape(self.xlabel)}</text>',
               f'<text transform="translate({_fmt(ox + 13)},{_fmt(oy + mt + ph / 2)}) rotate(-90)" '
               f'text-anchor="middle" font-size="11">{escape(self.ylabel)}</text>']

        def ticks(lo, hi, log):
            if log:
                mant = (1, 2, 5) if hi - lo < 2 else (1,)
                return [m * 10.0 ** e for e in range(math.floor(lo), math.ceil(hi) + 1) for m in mant
                        if lo <= math.log10(m * 10.0 ** e) <= hi]
            return nice_ticks(lo, hi)

        for t in ticks(x0, x1, self.xlog):
            px = tx(t)
            out.append(f'<line x1="{_fmt(px)}" y1="{_fmt(oy + mt + ph)}" x2="{_fmt(px)}" '
                       f'y2="{_fmt(oy + mt + ph + 4)}" stroke="#333"/>')
            out.append(f'<text x="{_fmt(px)}" y="{_fmt(oy + mt + ph + 16)}" text-anchor="middle" '
                       f'font-size="10">{_tick_label(t)}</text>')
        for t in ticks(y0, y1, self.ylog):
            py = ty(t)
            out.append(f'<line x1="{_fmt(ox + ml - 4)}" y1="{_fmt(py)}" x2="{_fmt(ox + ml)}" '
                       f'y2="{_fmt(py)}" stroke="#333"/>')
            out.append(f'<text x="{_fmt(ox + ml - 6)}" y="{_fmt(py + 3)}" text-anchor="end" '
                       f'font-size="10">{_tick_label(t)}</text>')
        for v, color in self.vlines:
            if self.xlog and v <= 0:
                continue
            px = tx(v)
            out.append(f'<line x1="{_fmt(px)}" y1="{_fmt(oy + mt)}" x2="{_fmt(px)}" y2="{_fmt(oy + mt + ph)}" '
                       f'stroke="{color}" stroke-dasharray="3,3"/>')

        for layer in self.layers:
            if not len(layer.x):
                continue
            xs, ys = tx(layer.x), ty(layer.y)
            if layer.kind == "line":
                pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(xs, ys))
                dash = ' stroke-dasharray="5,3"' if layer.dashed else ""
                out.append(f'<polyline points="{pts}" fill="none" stroke="{layer.color}" '
                           f'stroke-width="1.4"{dash}/>')
            else:
                out.extend(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="2" fill="{layer.color}"/>'
                           for a, b in zip(xs, ys))

        for i, layer in enumerate(labelled):
            ly = oy + mt + 8 + 13 * i
            lx = ox + ml + pw + 8
            if layer.kind == "points":
                out.append(f'<circle cx="{_fmt(lx + 8)}" cy="{_fmt(ly - 3)}" r="3" fill="{layer.color}"/>')
            else:
                dash = ' stroke-dasharray="5,3"' if layer.dashed else ""
                out.append(f'<line x1="{_fmt(lx)}" y1="{_fmt(ly - 3)}" x2="{_fmt(lx + 16)}" '
                           f'y2="{_fmt(ly - 3)}" stroke="{layer.color}" stroke-width="2"{dash}/>')
            out.append(f'<text x="{_fmt(lx + 20)}" y="{_fmt(ly)}" font-size="10">{escape(layer.label)}</text>')
        return out


def render_svg(panels: list[Panel], ncols: int = 2, panel_w: int = 560, panel_h: int = 300) -> str:
    ncols = max(1, min(ncols, len(panels)))
    nrows = math.ceil(len(panels) / ncols)
    w, h = ncols * panel_w, nrows * panel_h
    body = []
    for i, p in enumerate(panels):
        r, c = divmod(i, ncols)
        body.extend(p.render(c * panel_w, r * panel_h, panel_w, panel_h))
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" '
            f'font-family="sans-serif">\n<rect width="{w}" height="{h}" fill="white"/>\n'
            + "\n".join(body) + "\n</svg>\n")
