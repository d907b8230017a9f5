"""Deterministic SVG pictures of packed circles.

The drawing is coordinate-true: the SVG viewBox is expressed in model
units (y negated, since SVG's y axis points down) and every length is
formatted with a fixed ``%.6f`` so identical results produce identical
bytes.  The container is one outline element — a ``<circle>`` for disc
containers, a ``<rect>`` for strips — and each packed item is one filled
``<circle>``, so a result with n placed circles renders exactly n + 1
circle elements.  Items are told apart by hatch patterns cycling through
four angles and two line spacings.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping

from .files import decode_placement, instance_from_result

_DISPLAY_WIDTH = 640.0
_HATCH_ANGLES = (0, 45, 90, 135)
_HATCH_RATIOS = (1.0, 0.6)  # relative line spacings; 4 angles x 2 = 8 patterns


def _fmt(value: float) -> str:
    text = f"{value:.6f}"
    return "0.000000" if text == "-0.000000" else text


def _pattern_defs(used: list[int], base_spacing: float) -> list[str]:
    lines = ["<defs>"]
    for index in used:
        angle = _HATCH_ANGLES[index % len(_HATCH_ANGLES)]
        spacing = base_spacing * _HATCH_RATIOS[index // len(_HATCH_ANGLES)]
        stroke = spacing / 4.0
        lines.append(
            f'<pattern id="p{index}" patternUnits="userSpaceOnUse" '
            f'width="{_fmt(spacing)}" height="{_fmt(spacing)}" '
            f'patternTransform="rotate({angle})">'
        )
        lines.append(
            f'<line x1="0" y1="0" x2="0" y2="{_fmt(spacing)}" '
            f'stroke="#3a6ea5" stroke-width="{_fmt(stroke)}" />'
        )
        lines.append("</pattern>")
    lines.append("</defs>")
    return lines


def render_svg(payload: Mapping[str, Any], destination: Path | str) -> Path:
    """Draw the result's incumbent placement (or bare container) as SVG."""
    destination = Path(destination)
    instance = instance_from_result(destination, payload)
    placement = decode_placement(destination, payload.get("placement"))

    if placement is not None:
        size = float(placement.container_size)
        centers = placement.as_float_centers()
    else:
        size = float(payload["upper"])
        centers = {}

    stroke = max(size, 1e-9) / 200.0
    margin = 2.0 * stroke
    if instance.is_strip:
        width = float(instance.container.width)
        x0, y0 = -margin, -width - margin
        view_w, view_h = size + 2.0 * margin, width + 2.0 * margin
        container_tag = (
            f'<rect x="0.000000" y="{_fmt(-width)}" width="{_fmt(size)}" '
            f'height="{_fmt(width)}" fill="none" stroke="#000000" '
            f'stroke-width="{_fmt(stroke)}" />'
        )
    else:
        x0 = y0 = -size - margin
        view_w = view_h = 2.0 * (size + margin)
        container_tag = (
            f'<circle cx="0.000000" cy="0.000000" r="{_fmt(size)}" fill="none" '
            f'stroke="#000000" stroke-width="{_fmt(stroke)}" />'
        )

    total_patterns = len(_HATCH_ANGLES) * len(_HATCH_RATIOS)
    items: list[str] = []
    used_patterns: list[int] = []
    base_spacing = (min(instance.radii) if centers else size) / 3.0
    radius_of = {circle.id: float(circle.radius) for circle in instance.circles}
    for index, cid in enumerate(sorted(centers)):
        x, y = centers[cid]
        radius = radius_of[cid]
        pattern = index % total_patterns
        if pattern not in used_patterns:
            used_patterns.append(pattern)
        items.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(-y)}" r="{_fmt(radius)}" '
            f'fill="url(#p{pattern})" stroke="#000000" '
            f'stroke-width="{_fmt(0.5 * stroke)}" />'
        )

    display_h = _DISPLAY_WIDTH * view_h / view_w
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(_DISPLAY_WIDTH)}" '
        f'height="{_fmt(display_h)}" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(view_w)} {_fmt(view_h)}">',
    ]
    if used_patterns:
        lines.extend(_pattern_defs(sorted(used_patterns), base_spacing))
    lines.append(container_tag)
    lines.extend(items)
    lines.append("</svg>")
    destination.write_text("\n".join(lines) + "\n")
    return destination
