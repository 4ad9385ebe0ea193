"""Straight-line schematic of a route plan as a standalone SVG."""

from __future__ import annotations

from .instance import ProblemInstance
from .transport import RoutePlan

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def has_coordinates(inst: ProblemInstance) -> bool:
    return inst.depot_xy is not None and all(s.x is not None and s.y is not None for s in inst.sites)


def render_svg(inst: ProblemInstance, plan: RoutePlan, size: int = 640, title: str = "") -> str:
    if not has_coordinates(inst):
        raise ValueError("instance has no site coordinates")
    pts = {0: inst.depot_xy, **{s.id: (s.x, s.y) for s in inst.sites}}
    xs = [p[0] for p in pts.values()]
    ys = [p[1] for p in pts.values()]
    pad = 30
    span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    k = (size - 2 * pad) / span

    def at(node):
        x, y = pts[node]
        # SVG y grows downwards
        return pad + (x - min(xs)) * k, size - pad - (y - min(ys)) * k

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{pad}" y="18" font-family="sans-serif" font-size="13">{title}</text>')
    for h, r in enumerate(r for r in plan.routes if r):
        colour = PALETTE[h % len(PALETTE)]
        path = " ".join(f"{x:.1f},{y:.1f}" for x, y in map(at, (0, *r, 0)))
        out.append(f'<polyline points="{path}" fill="none" stroke="{colour}" stroke-width="2"/>')
    for node in pts:
        x, y = at(node)
        label = inst.label(node)
        if node == 0:
            out.append(f'<rect x="{x - 6:.1f}" y="{y - 6:.1f}" width="12" height="12" fill="black"/>')
        else:
            out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="4" fill="#444"/>')
        out.append(f'<text x="{x + 6:.1f}" y="{y - 6:.1f}" font-family="sans-serif" font-size="10">{label}</text>')
    out.append("</svg>")
    return "\n".join(out)
