"""Minimal deterministic SVG plotting.

Produces standalone SVG line/scatter plots with axes, tick labels, and
axis titles taken from CSV headers.  No plotting library is pulled in:
outputs are plain text, stable across runs, and diff-friendly, which is
what the reproducibility contract needs.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .core import ValidationError

WIDTH, HEIGHT = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 72, 24, 28, 56
SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                 "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float, target: int = 6) -> np.ndarray:
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** np.floor(np.log10(raw))
    step = 10.0 * mag
    for mult in (1.0, 2.0, 2.5, 5.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = np.ceil(lo / step) * step
    return np.arange(first, hi + 0.5 * step, step)


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.2e}"
    return f"{v:.6g}"


class SvgCanvas:
    """Axes-bearing canvas mapping data coordinates to pixels."""

    def __init__(self, x_range: tuple[float, float],
                 y_range: tuple[float, float],
                 x_label: str = "", y_label: str = "",
                 log_y: bool = False):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.log_y = log_y
        if log_y and self.y0 <= 0:
            raise ValidationError("log axis needs positive y range")
        self.parts: list[str] = []
        self._n_legend = 0
        self._frame(x_label, y_label)

    # pixel transforms
    def px(self, x: float) -> float:
        t = (x - self.x0) / (self.x1 - self.x0)
        return MARGIN_L + t * (WIDTH - MARGIN_L - MARGIN_R)

    def py(self, y: float) -> float:
        if self.log_y:
            t = (np.log10(y) - np.log10(self.y0)) / (
                np.log10(self.y1) - np.log10(self.y0))
        else:
            t = (y - self.y0) / (self.y1 - self.y0)
        return HEIGHT - MARGIN_B - t * (HEIGHT - MARGIN_T - MARGIN_B)

    def _frame(self, x_label: str, y_label: str) -> None:
        p = self.parts
        p.append(f'<rect x="{MARGIN_L}" y="{MARGIN_T}" '
                 f'width="{WIDTH - MARGIN_L - MARGIN_R}" '
                 f'height="{HEIGHT - MARGIN_T - MARGIN_B}" '
                 'fill="none" stroke="#202020" stroke-width="1"/>')
        for xv in _ticks(self.x0, self.x1):
            xp = self.px(xv)
            p.append(f'<line x1="{xp:.2f}" y1="{HEIGHT - MARGIN_B}" '
                     f'x2="{xp:.2f}" y2="{HEIGHT - MARGIN_B + 5}" '
                     'stroke="#202020"/>')
            p.append(f'<text x="{xp:.2f}" y="{HEIGHT - MARGIN_B + 18}" '
                     'font-size="11" text-anchor="middle" '
                     f'font-family="monospace">{_fmt(xv)}</text>')
        if self.log_y:
            lo = int(np.floor(np.log10(self.y0)))
            hi = int(np.ceil(np.log10(self.y1)))
            yticks = [10.0 ** e for e in range(lo, hi + 1)
                      if self.y0 <= 10.0 ** e <= self.y1]
        else:
            yticks = list(_ticks(self.y0, self.y1))
        for yv in yticks:
            yp = self.py(yv)
            p.append(f'<line x1="{MARGIN_L - 5}" y1="{yp:.2f}" '
                     f'x2="{MARGIN_L}" y2="{yp:.2f}" stroke="#202020"/>')
            p.append(f'<text x="{MARGIN_L - 8}" y="{yp + 4:.2f}" '
                     'font-size="11" text-anchor="end" '
                     f'font-family="monospace">{_fmt(yv)}</text>')
        if x_label:
            p.append(f'<text x="{(MARGIN_L + WIDTH - MARGIN_R) / 2:.1f}" '
                     f'y="{HEIGHT - 12}" font-size="13" text-anchor="middle" '
                     f'font-family="monospace">{x_label}</text>')
        if y_label:
            yc = (MARGIN_T + HEIGHT - MARGIN_B) / 2
            p.append(f'<text x="16" y="{yc:.1f}" font-size="13" '
                     'text-anchor="middle" font-family="monospace" '
                     f'transform="rotate(-90 16 {yc:.1f})">{y_label}</text>')

    def polyline(self, x: np.ndarray, y: np.ndarray, color: str,
                 label: str = "") -> None:
        pts = " ".join(f"{self.px(a):.2f},{self.py(b):.2f}"
                       for a, b in zip(x, y))
        self.parts.append(f'<polyline points="{pts}" fill="none" '
                          f'stroke="{color}" stroke-width="1.5"/>')
        if label:
            self._legend(label, color)

    def scatter(self, x: np.ndarray, y: np.ndarray, color: str,
                label: str = "") -> None:
        for a, b in zip(x, y):
            self.parts.append(f'<circle cx="{self.px(a):.2f}" '
                              f'cy="{self.py(b):.2f}" r="3.5" '
                              f'fill="{color}"/>')
        if label:
            self._legend(label, color)

    def _legend(self, label: str, color: str) -> None:
        y = MARGIN_T + 16 + 16 * self._n_legend
        x = WIDTH - MARGIN_R - 160
        self.parts.append(f'<rect x="{x}" y="{y - 9}" width="10" '
                          f'height="10" fill="{color}"/>')
        self.parts.append(f'<text x="{x + 16}" y="{y}" font-size="12" '
                          f'font-family="monospace">{label}</text>')
        self._n_legend += 1

    def render(self) -> str:
        body = "\n".join(self.parts)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'width="{WIDTH}" height="{HEIGHT}" '
                f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
                f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>\n'
                f'{body}\n</svg>\n')

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.render())


def _span(arr: np.ndarray, pad: float = 0.05) -> tuple[float, float]:
    finite = arr[np.isfinite(arr)]
    if finite.size == 0:
        return -1.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    if hi == lo:
        return lo - 1.0, hi + 1.0
    d = pad * (hi - lo)
    return lo - d, hi + d


def plot_series(header: Sequence[str], data: np.ndarray,
                out: Union[str, Path], kind: str = "line",
                log_y: bool = False) -> None:
    """Plot columns 1..n of a numeric table against column 0."""
    if kind not in ("line", "scatter"):
        raise ValidationError(f"unknown plot kind {kind!r}")
    if data.ndim != 2 or data.shape[1] < 2 or data.shape[0] < 1:
        raise ValidationError("need at least one (x, y) series to plot")
    x = data[:, 0]
    ys = data[:, 1:]
    ylo, yhi = _span(ys)
    if log_y:
        pos = ys[ys > 0]
        if pos.size == 0:
            raise ValidationError("log plot with no positive values")
        ylo, yhi = float(pos.min()) * 0.8, float(pos.max()) * 1.25
    canvas = SvgCanvas(_span(x, 0.02), (ylo, yhi),
                       x_label=header[0],
                       y_label=header[1] if ys.shape[1] == 1 else "",
                       log_y=log_y)
    for j in range(ys.shape[1]):
        keep = np.isfinite(x) & np.isfinite(ys[:, j])
        if not keep.any():
            continue
        color = SERIES_COLORS[j % len(SERIES_COLORS)]
        label = header[j + 1] if ys.shape[1] > 1 else ""
        if kind == "line":
            canvas.polyline(x[keep], ys[keep, j], color, label)
        else:
            canvas.scatter(x[keep], ys[keep, j], color, label)
    canvas.save(out)


def plot_resonances(widths: np.ndarray, masses: np.ndarray,
                    intercept_C: float, out: Union[str, Path],
                    slope: float = 2.1,
                    label: Optional[str] = None) -> None:
    """Scatter of M/Gamma against Gamma with the slope + C/Gamma curve."""
    widths = np.asarray(widths, dtype=float)
    masses = np.asarray(masses, dtype=float)
    ratios = masses / widths
    g_lo, g_hi = float(widths.min()) * 0.8, float(widths.max()) * 1.1
    curve_g = np.linspace(g_lo, g_hi, 256)
    curve_r = slope + intercept_C / curve_g
    ylo = min(float(ratios.min()), float(curve_r.min())) * 0.8
    yhi = max(float(ratios.max()), float(curve_r.max())) * 1.1
    canvas = SvgCanvas((g_lo, g_hi), (ylo, yhi),
                       x_label="width_mev", y_label="mass_over_width")
    canvas.polyline(curve_g, curve_r, SERIES_COLORS[1],
                    label=f"{slope:g} + {intercept_C:.1f}/width")
    canvas.scatter(widths, ratios, SERIES_COLORS[0],
                   label=label or "records")
    canvas.save(out)
