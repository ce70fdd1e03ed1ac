"""Deterministic SVG rendering for heatmaps and token boxplots.

Figures are a convenience layer over the CSV tables; every number shown
here is also present in a table. Output is plain string assembly, so
identical inputs yield identical bytes.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

CELL = 64
MARGIN_LEFT = 110
MARGIN_TOP = 70
LABEL_FONT = 12
VALUE_FONT = 11


def _blend(low: tuple[int, int, int], high: tuple[int, int, int], t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    channels = tuple(round(l + (h - l) * t) for l, h in zip(low, high))
    return f"#{channels[0]:02x}{channels[1]:02x}{channels[2]:02x}"


def _cell_color(value: float, limit: float, diverging: bool) -> str:
    if limit == 0.0:
        return "#ffffff"
    if diverging:
        # blue for negative, white at zero, red for positive
        if value < 0:
            return _blend((255, 255, 255), (42, 90, 175), -value / limit)
        return _blend((255, 255, 255), (188, 54, 49), value / limit)
    return _blend((255, 255, 255), (54, 102, 161), value / limit)


def render_heatmap(
    values: np.ndarray,
    labels: Sequence[str],
    title: str,
    value_format: str = "{:.3f}",
) -> str:
    """Square heatmap with printed cell values; NaN cells are hatched.

    A diverging palette centered at zero is used whenever any finite
    entry is negative.
    """
    values = np.asarray(values, dtype=np.float64)
    size = values.shape[0]
    finite = values[np.isfinite(values)]
    diverging = bool(finite.size and finite.min() < 0.0)
    limit = float(np.abs(finite).max()) if finite.size else 0.0

    width = MARGIN_LEFT + CELL * size + 20
    height = MARGIN_TOP + CELL * size + 20
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<defs>"
        '<pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" '
        'patternTransform="rotate(45)">'
        '<rect width="6" height="6" fill="#f2f2f2"/>'
        '<line x1="0" y1="0" x2="0" y2="6" stroke="#b0b0b0" stroke-width="1.5"/>'
        "</pattern>"
        "</defs>",
        f'<text x="{MARGIN_LEFT}" y="22" font-family="sans-serif" font-size="14" '
        f'font-weight="bold">{title}</text>',
    ]
    for j, label in enumerate(labels):
        x = MARGIN_LEFT + j * CELL + CELL // 2
        parts.append(
            f'<text x="{x}" y="{MARGIN_TOP - 10}" font-family="sans-serif" '
            f'font-size="{LABEL_FONT}" text-anchor="middle">{label}</text>'
        )
    for i, label in enumerate(labels):
        y = MARGIN_TOP + i * CELL + CELL // 2 + 4
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{y}" font-family="sans-serif" '
            f'font-size="{LABEL_FONT}" text-anchor="end">{label}</text>'
        )
    for i in range(size):
        for j in range(size):
            x = MARGIN_LEFT + j * CELL
            y = MARGIN_TOP + i * CELL
            value = values[i, j]
            if math.isnan(value):
                parts.append(
                    f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                    f'fill="url(#hatch)" stroke="#808080"/>'
                )
                continue
            color = _cell_color(value, limit, diverging)
            parts.append(
                f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                f'fill="{color}" stroke="#808080"/>'
            )
            strong = limit > 0 and abs(value) / limit > 0.6
            text_color = "#ffffff" if strong else "#1a1a1a"
            parts.append(
                f'<text x="{x + CELL // 2}" y="{y + CELL // 2 + 4}" '
                f'font-family="monospace" font-size="{VALUE_FONT}" text-anchor="middle" '
                f'fill="{text_color}">{value_format.format(value)}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_boxplot(
    stats_by_model: Mapping[str, tuple[float, float, float, float, float]],
    title: str = "tokens per emoji",
) -> str:
    """Side-by-side boxes from (min, q1, median, q3, max) summaries."""
    models = list(stats_by_model)
    slot = 110
    width = 90 + slot * len(models)
    height = 320
    top, bottom = 50, height - 50
    peak = max(box[4] for box in stats_by_model.values())
    floor = min(box[0] for box in stats_by_model.values())
    span = max(peak - floor, 1e-9)

    def y_of(value: float) -> float:
        return bottom - (value - floor) / span * (bottom - top)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<text x="20" y="24" font-family="sans-serif" font-size="14" '
        f'font-weight="bold">{title}</text>',
        f'<line x1="50" y1="{top}" x2="50" y2="{bottom}" stroke="#404040"/>',
    ]
    for tick in range(int(math.floor(floor)), int(math.ceil(peak)) + 1, max(1, int(span // 8) or 1)):
        y = y_of(tick)
        parts.append(f'<line x1="46" y1="{y:.1f}" x2="50" y2="{y:.1f}" stroke="#404040"/>')
        parts.append(
            f'<text x="42" y="{y + 4:.1f}" font-family="sans-serif" font-size="10" '
            f'text-anchor="end">{tick}</text>'
        )
    for index, model in enumerate(models):
        low, q1, median, q3, high = stats_by_model[model]
        center = 90 + slot * index + slot // 2
        half = 28
        parts.extend(
            [
                f'<line x1="{center}" y1="{y_of(high):.1f}" x2="{center}" y2="{y_of(q3):.1f}" stroke="#404040"/>',
                f'<line x1="{center}" y1="{y_of(q1):.1f}" x2="{center}" y2="{y_of(low):.1f}" stroke="#404040"/>',
                f'<line x1="{center - 14}" y1="{y_of(high):.1f}" x2="{center + 14}" y2="{y_of(high):.1f}" stroke="#404040"/>',
                f'<line x1="{center - 14}" y1="{y_of(low):.1f}" x2="{center + 14}" y2="{y_of(low):.1f}" stroke="#404040"/>',
                f'<rect x="{center - half}" y="{y_of(q3):.1f}" width="{2 * half}" '
                f'height="{max(y_of(q1) - y_of(q3), 0.5):.1f}" fill="#cfe0f1" stroke="#404040"/>',
                f'<line x1="{center - half}" y1="{y_of(median):.1f}" x2="{center + half}" '
                f'y2="{y_of(median):.1f}" stroke="#1f3d5c" stroke-width="2"/>',
                f'<text x="{center}" y="{bottom + 20}" font-family="sans-serif" font-size="12" '
                f'text-anchor="middle">{model}</text>',
            ]
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
