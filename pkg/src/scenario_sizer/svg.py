"""Minimal static SVG line plots (polylines, axes, tick labels)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["Panel", "render", "trace_figure", "fit_figure"]

WIDTH = 640
PANEL_H = 180
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 20, 24, 30
COLORS = ("#1f4e9c", "#c0392b", "#2e8b57", "#7f7f7f")


@dataclass
class Panel:
    title: str
    series: list = field(default_factory=list)  # (x, y, color, kind) with kind "line"|"step"|"bars"
    hlines: list = field(default_factory=list)  # (y, color)
    vlines: list = field(default_factory=list)  # (x, color)
    xlabel: str = ""
    ylim: tuple | None = None

    def line(self, x, y, color=COLORS[0], kind="line"):
        self.series.append((np.asarray(x, float), np.asarray(y, float), color, kind))
        return self


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    return [first + k * step for k in range(int((hi - first) / step + 1e-9) + 1)]


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-2:
        return f"{v:.0e}"
    return f"{v:.6g}"


def _limits(panel: Panel):
    xs = [s[0] for s in panel.series if s[0].size]
    ys = [s[1][np.isfinite(s[1])] for s in panel.series if s[1].size]
    x0 = min((x.min() for x in xs), default=0.0)
    x1 = max((x.max() for x in xs), default=1.0)
    if panel.ylim is not None:
        y0, y1 = panel.ylim
    else:
        ys = [y for y in ys if y.size]
        y0 = min((y.min() for y in ys), default=0.0)
        y1 = max((y.max() for y in ys), default=1.0)
        y0 = min(y0, *(h[0] for h in panel.hlines)) if panel.hlines else y0
        y1 = max(y1, *(h[0] for h in panel.hlines)) if panel.hlines else y1
        pad = 0.05 * (y1 - y0) or 0.5
        y0, y1 = y0 - pad, y1 + pad
    if x1 == x0:
        x1 = x0 + 1.0
    return x0, x1, y0, y1


def _panel_svg(panel: Panel, top: float) -> list[str]:
    x0, x1, y0, y1 = _limits(panel)
    left, right = MARGIN_L, WIDTH - MARGIN_R
    ptop, pbot = top + MARGIN_T, top + PANEL_H - MARGIN_B

    def px(x):
        return left + (x - x0) / (x1 - x0) * (right - left)

    def py(y):
        return pbot - (y - y0) / (y1 - y0) * (pbot - ptop)

    out = [
        f'<text x="{left}" y="{top + 16}" font-size="13">{escape(panel.title)}</text>',
        f'<rect x="{left}" y="{ptop}" width="{right - left}" height="{pbot - ptop}" '
        'fill="none" stroke="#000" stroke-width="0.8"/>',
    ]
    for t in _ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{pbot}" x2="{X:.2f}" y2="{pbot + 4}" stroke="#000"/>')
        out.append(
            f'<text x="{X:.2f}" y="{pbot + 16}" font-size="10" text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in _ticks(y0, y1, 4):
        Y = py(t)
        out.append(f'<line x1="{left - 4}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="#000"/>')
        out.append(
            f'<text x="{left - 6}" y="{Y + 3:.2f}" font-size="10" text-anchor="end">{_fmt(t)}</text>'
        )
    if panel.xlabel:
        out.append(
            f'<text x="{right}" y="{pbot + 28}" font-size="10" text-anchor="end">'
            f"{escape(panel.xlabel)}</text>"
        )

    clip = f'clip-path="url(#c{int(top)})"'
    out.append(
        f'<clipPath id="c{int(top)}"><rect x="{left}" y="{ptop}" '
        f'width="{right - left}" height="{pbot - ptop}"/></clipPath>'
    )
    for y, color in panel.hlines:
        out.append(
            f'<line x1="{left}" y1="{py(y):.2f}" x2="{right}" y2="{py(y):.2f}" '
            f'stroke="{color}" stroke-dasharray="4 3" {clip}/>'
        )
    for x, color in panel.vlines:
        out.append(
            f'<line x1="{px(x):.2f}" y1="{ptop}" x2="{px(x):.2f}" y2="{pbot}" '
            f'stroke="{color}" stroke-dasharray="4 3" {clip}/>'
        )
    for x, y, color, kind in panel.series:
        if kind == "bars":
            width = (x[1] - x[0]) if x.size > 1 else 1.0
            for xi, yi in zip(x, y):
                X0, X1 = px(xi - width / 2), px(xi + width / 2)
                out.append(
                    f'<rect x="{X0:.2f}" y="{py(yi):.2f}" width="{X1 - X0:.2f}" '
                    f'height="{py(y0) - py(yi):.2f}" fill="{color}" fill-opacity="0.35" {clip}/>'
                )
            continue
        ok = np.isfinite(y)
        x, y = x[ok], y[ok]
        if kind == "step" and x.size > 1:
            x = np.repeat(x, 2)[1:]
            y = np.repeat(y, 2)[:-1]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2" {clip}/>'
        )
    return out


def render(panels: list[Panel]) -> str:
    height = PANEL_H * len(panels)
    body = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">',
        f'<rect width="{WIDTH}" height="{height}" fill="#fff"/>',
    ]
    for k, panel in enumerate(panels):
        body.extend(_panel_svg(panel, k * PANEL_H))
    body.append("</svg>")
    return "\n".join(body) + "\n"


def trace_figure(trace, epsilon: float, beta: float) -> str:
    """Three panels: N_t, theta_t, and the empirical cdf of the risks."""
    t = np.array([r.t for r in trace], dtype=float)
    N = np.array([r.N for r in trace], dtype=float)
    theta = np.array([np.nan if r.theta is None else r.theta for r in trace])
    risks = np.sort([r.risk for r in trace])
    ecdf = np.arange(1, risks.size + 1) / risks.size
    return render(
        [
            Panel("sample size N_t", xlabel="t").line(t, N, kind="step"),
            Panel("fitted theta_t", xlabel="t").line(t, theta, COLORS[1]),
            Panel(
                "cumulative of risks v_t",
                hlines=[(beta, COLORS[3])],
                vlines=[(epsilon, COLORS[3])],
                xlabel="v",
                ylim=(0.0, 1.0),
            ).line(np.concatenate([[0.0], risks]), np.concatenate([[0.0], ecdf]), COLORS[2], "step"),
        ]
    )


def fit_figure(risks, N: int, theta: float, bins: int = 30) -> str:
    """Histogram (density) of the risks observed at ``N`` with the fitted pdf on top."""
    from .risk_model import pdf

    risks = np.asarray(risks, dtype=float)
    panel = Panel(f"risks at N={N}, fitted theta={theta:.4g}", xlabel="v")
    if risks.size:
        dens, edges = np.histogram(risks, bins=bins, range=(0.0, 1.0), density=True)
        panel.line(0.5 * (edges[1:] + edges[:-1]), dens, COLORS[0], "bars")
    v = np.linspace(0.0, 1.0, 401)[1:-1]
    panel.line(v, [pdf(theta, x, N) for x in v], COLORS[1])
    return render([panel])
