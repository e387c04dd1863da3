"""Self-contained SVG regret plots (no plotting dependency).

Renders median regret lines with interquartile bands per arm on a
log-scale regret axis against cumulative shots.  Regret can dip to or
below zero through observation noise; values at or under the display
floor are drawn on the floor line, which is dashed and labelled as the
zero level.  The SVG is a derived artifact: the CSV aggregates are the
canonical output and are never reconstructed from it.
"""

from __future__ import annotations

import math

_COLORS = ["#d62728", "#1f77b4", "#ff9f1c", "#2ca02c", "#9467bd",
           "#8c564b", "#17becf", "#e377c2"]

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 80, 24, 36, 56


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _shot_label(v: float) -> str:
    if v >= 1e6:
        return f"{v / 1e6:g}M"
    if v >= 1e3:
        return f"{v / 1e3:g}k"
    return f"{v:g}"


def render_regret_svg(arm_curves: dict, path, title: str = "regret vs shots"):
    """Write the combined regret plot.

    ``arm_curves`` maps arm name -> dict with keys ``shots``, ``median``,
    ``q25``, ``q75`` (equal-length sequences; leading entries may be NaN
    where an arm has no incumbent yet).
    """
    xs_all, ys_all = [], []
    for c in arm_curves.values():
        for s, lo, hi in zip(c["shots"], c["q25"], c["q75"]):
            if not (math.isnan(lo) or math.isnan(hi)):
                xs_all.append(s)
                ys_all.extend([lo, hi])
    if not xs_all:
        raise ValueError("no finite curve data to plot")

    x_min, x_max = 0.0, max(xs_all)
    pos = [y for y in ys_all if y > 0]
    y_top = max(pos) if pos else 1.0
    floor = max(min(pos) / 4 if pos else 1e-8, y_top * 1e-8)
    ly_min, ly_max = math.log10(floor), math.log10(y_top)
    if ly_max - ly_min < 0.5:
        ly_max = ly_min + 0.5

    def sx(x):
        return _ML + (x - x_min) / (x_max - x_min or 1.0) * (_W - _ML - _MR)

    def sy(y):
        ly = math.log10(max(y, floor))
        return _H - _MB - (ly - ly_min) / (ly_max - ly_min) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.0f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
    ]

    # axes
    parts.append(f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" '
                 f'y2="{_H - _MB}" stroke="black"/>')
    parts.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" '
                 f'stroke="black"/>')

    # x ticks
    for i in range(5):
        xv = x_min + (x_max - x_min) * i / 4
        parts.append(f'<line x1="{_fmt(sx(xv))}" y1="{_H - _MB}" '
                     f'x2="{_fmt(sx(xv))}" y2="{_H - _MB + 5}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(sx(xv))}" y="{_H - _MB + 20}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{_shot_label(xv)}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.0f}" y="{_H - 12}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="12">cumulative shots</text>')

    # y ticks at powers of ten
    for e in range(math.ceil(ly_min), math.floor(ly_max) + 1):
        yv = 10.0 ** e
        parts.append(f'<line x1="{_ML - 5}" y1="{_fmt(sy(yv))}" x2="{_ML}" '
                     f'y2="{_fmt(sy(yv))}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{_fmt(sy(yv) + 4)}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11">1e{e}</text>')
    parts.append(f'<text x="18" y="{(_MT + _H - _MB) / 2:.0f}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="12" transform="rotate(-90 18 '
                 f'{(_MT + _H - _MB) / 2:.0f})">simple regret</text>')

    # floor line marking the zero level
    parts.append(f'<line x1="{_ML}" y1="{_fmt(sy(floor))}" x2="{_W - _MR}" '
                 f'y2="{_fmt(sy(floor))}" stroke="#888" stroke-dasharray="6 4"/>')
    parts.append(f'<text x="{_W - _MR}" y="{_fmt(sy(floor) - 5)}" '
                 f'text-anchor="end" font-family="sans-serif" font-size="10" '
                 f'fill="#888">0 (display floor {floor:.1e})</text>')

    # curves
    for idx, (name, c) in enumerate(arm_curves.items()):
        color = _COLORS[idx % len(_COLORS)]
        pts = [(s, m, lo, hi) for s, m, lo, hi in
               zip(c["shots"], c["median"], c["q25"], c["q75"])
               if not math.isnan(m)]
        if not pts:
            continue
        band = " ".join(f"{_fmt(sx(s))},{_fmt(sy(hi))}" for s, _, _, hi in pts)
        band += " " + " ".join(f"{_fmt(sx(s))},{_fmt(sy(lo))}"
                               for s, _, lo, _ in reversed(pts))
        parts.append(f'<polygon points="{band}" fill="{color}" '
                     f'fill-opacity="0.15" stroke="none"/>')
        line = " ".join(f"{_fmt(sx(s))},{_fmt(sy(m))}" for s, m, _, _ in pts)
        parts.append(f'<polyline points="{line}" fill="none" '
                     f'stroke="{color}" stroke-width="1.8"/>')
        ly = _MT + 16 * idx + 8
        parts.append(f'<line x1="{_W - _MR - 150}" y1="{ly}" '
                     f'x2="{_W - _MR - 122}" y2="{ly}" stroke="{color}" '
                     f'stroke-width="2"/>')
        parts.append(f'<text x="{_W - _MR - 116}" y="{ly + 4}" '
                     f'font-family="sans-serif" font-size="11">{name}</text>')

    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
