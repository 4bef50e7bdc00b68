"""Static SVG drawings of a rasterized domain with its sandwich balls."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .raster import RasterDomain

PX = 400  # drawing width in pixels


def _runs(row: np.ndarray) -> list[tuple[int, int]]:
    padded = np.concatenate([[False], row, [False]])
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return list(zip(edges[::2], edges[1::2]))


def domain_svg(
    raster: RasterDomain,
    inner: tuple[Sequence[float], float] | None = None,
    outer: tuple[Sequence[float], float] | None = None,
    reference: tuple[Sequence[float], float] | None = None,
) -> str:
    """Occupancy in grey, inner ball green, outer ball red, reference ball dashed."""
    h = raster.h
    circles = [c for c in (inner, outer, reference) if c is not None]
    x0 = raster.origin[0] - h / 2
    y0 = raster.origin[1] - h / 2
    x1 = x0 + raster.width * h
    y1 = y0 + raster.height * h
    for (cx, cy), rad in circles:
        x0, x1 = min(x0, cx - rad), max(x1, cx + rad)
        y0, y1 = min(y0, cy - rad), max(y1, cy + rad)
    margin = 0.02 * max(x1 - x0, y1 - y0)
    x0, y0, x1, y1 = x0 - margin, y0 - margin, x1 + margin, y1 + margin
    scale = PX / (x1 - x0)
    height = (y1 - y0) * scale

    def sx(x: float) -> str:
        return f"{(x - x0) * scale:.3f}"

    def sy(y: float) -> str:
        return f"{(y1 - y) * scale:.3f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{PX}" height="{height:.0f}" '
        f'viewBox="0 0 {PX} {height:.3f}">',
        '<g fill="#b0b0b0" stroke="none">',
    ]
    for i in range(raster.height):
        yb = raster.origin[1] + (i + 0.5) * h
        for a, b in _runs(raster.occupancy[i]):
            xa = raster.origin[0] + (a - 0.5) * h
            out.append(
                f'<rect x="{sx(xa)}" y="{sy(yb)}" width="{(b - a) * h * scale:.3f}" '
                f'height="{h * scale:.3f}"/>'
            )
    out.append("</g>")
    styles = [
        (inner, 'stroke="#1a9850" stroke-width="2"'),
        (outer, 'stroke="#d73027" stroke-width="2"'),
        (reference, 'stroke="#000000" stroke-width="1" stroke-dasharray="4 3"'),
    ]
    for circ, style in styles:
        if circ is None:
            continue
        (cx, cy), rad = circ
        out.append(f'<circle cx="{sx(cx)}" cy="{sy(cy)}" r="{rad * scale:.3f}" fill="none" {style}/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
