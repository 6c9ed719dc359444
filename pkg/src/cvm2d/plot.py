"""Self-contained SVG line chart of sweep results versus h."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .sweep import SweepRow

SERIES = ("y2", "delta", "enthalpy", "neg_entropy", "free_energy")
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")

_W, _H = 720, 440
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 150, 30, 50


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def sweep_svg(rows: Sequence[SweepRow], title: str = "") -> str:
    """Pre-perturbation curves solid, post-perturbation curves dashed."""
    if not rows:
        raise ValueError("nothing to plot")
    hs = [r.h for r in rows]
    vals = [getattr(r, s) for r in rows for s in SERIES]
    h_lo, h_hi = min(hs), max(hs)
    v_lo, v_hi = min(vals), max(vals)
    if h_hi == h_lo:
        h_lo, h_hi = h_lo - 0.5, h_hi + 0.5
    if v_hi == v_lo:
        v_lo, v_hi = v_lo - 0.5, v_hi + 0.5
    pad = 0.05 * (v_hi - v_lo)
    v_lo, v_hi = v_lo - pad, v_hi + pad
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def px(h: float) -> float:
        return _LEFT + (h - h_lo) / (h_hi - h_lo) * pw

    def py(v: float) -> float:
        return _TOP + (v_hi - v) / (v_hi - v_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    if title:
        out.append(f'<text x="{_LEFT}" y="{_TOP - 10}" font-size="13">{escape(title)}</text>')
    for t in _ticks(h_lo, h_hi):
        x = px(t)
        out.append(f'<line x1="{x:.1f}" y1="{_TOP + ph}" x2="{x:.1f}" y2="{_TOP + ph + 4}" stroke="#444"/>')
        out.append(f'<text x="{x:.1f}" y="{_TOP + ph + 16}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(v_lo, v_hi):
        y = py(t)
        out.append(f'<line x1="{_LEFT}" y1="{y:.1f}" x2="{_LEFT + pw}" y2="{y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{_LEFT - 6}" y="{y + 4:.1f}" text-anchor="end">{t:.3g}</text>')
    if v_lo < 0 < v_hi:
        out.append(f'<line x1="{_LEFT}" y1="{py(0):.1f}" x2="{_LEFT + pw}" y2="{py(0):.1f}" stroke="#888"/>')
    out.append(f'<text x="{_LEFT + pw / 2}" y="{_H - 12}" text-anchor="middle">h</text>')

    for phase, dash in (("pre_perturb", ""), ("post_perturb", ' stroke-dasharray="5,4"')):
        sel = sorted((r for r in rows if r.phase == phase), key=lambda r: r.h)
        if not sel:
            continue
        for name, color in zip(SERIES, _COLORS):
            pts = " ".join(f"{px(r.h):.1f},{py(getattr(r, name)):.1f}" for r in sel)
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"{dash}/>')

    lx = _LEFT + pw + 15
    for k, (name, color) in enumerate(zip(SERIES, _COLORS)):
        y = _TOP + 10 + 18 * k
        out.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 22}" y2="{y}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{y + 4}">{name}</text>')
    y = _TOP + 10 + 18 * len(SERIES) + 8
    out.append(f'<text x="{lx}" y="{y}" fill="#555">solid: pre-perturb</text>')
    out.append(f'<text x="{lx}" y="{y + 15}" fill="#555">dashed: post-perturb</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
