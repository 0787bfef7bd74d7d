"""Static SVG rendering of a vocabulary as a fan of token polylines."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import quoteattr

from .vocab import TokenSource, Vocabulary

COLORS = {
    TokenSource.MEAN: "#1f77b4",
    TokenSource.INTERPOLATED: "#ff7f0e",
    TokenSource.SAMPLED: "#2ca02c",
}


def render_svg(v: Vocabulary, px_per_m: float = 40.0, margin_px: float = 20.0) -> str:
    """SVG markup. Agent-frame +x points right and +y points up."""
    if len(v) == 0:
        raise ValueError("cannot render an empty vocabulary")
    g = v.grid
    pts = v.points
    x_lo = min(g.x_min, 0.0, float(pts[:, :, 0].min()))
    x_hi = max(g.x_max, 0.0, float(pts[:, :, 0].max()))
    y_lo = min(g.y_min, 0.0, float(pts[:, :, 1].min()))
    y_hi = max(g.y_max, 0.0, float(pts[:, :, 1].max()))
    width = (x_hi - x_lo) * px_per_m + 2 * margin_px
    height = (y_hi - y_lo) * px_per_m + 2 * margin_px

    def sx(x: float) -> float:
        return margin_px + (x - x_lo) * px_per_m

    def sy(y: float) -> float:
        return margin_px + (y_hi - y) * px_per_m

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2f}" height="{height:.2f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}" data-px-per-m="{px_per_m!r}" '
        f'data-x-origin="{sx(0.0)!r}" data-y-origin="{sy(0.0)!r}">',
        f"<title>{v.agent_type} vocabulary, {len(v)} tokens</title>",
        f'<rect class="grid-bounds" x="{sx(g.x_min)!r}" y="{sy(g.y_max)!r}" '
        f'width="{(g.x_max - g.x_min) * px_per_m!r}" height="{(g.y_max - g.y_min) * px_per_m!r}" '
        'fill="none" stroke="#999" stroke-dasharray="4 2"/>',
        f'<line class="axis" x1="{sx(x_lo)!r}" y1="{sy(0.0)!r}" x2="{sx(x_hi)!r}" y2="{sy(0.0)!r}" stroke="#000"/>',
        f'<line class="axis" x1="{sx(0.0)!r}" y1="{sy(y_lo)!r}" x2="{sx(0.0)!r}" y2="{sy(y_hi)!r}" stroke="#000"/>',
        '<g class="tokens" fill="none" stroke-width="0.8" stroke-opacity="0.6">',
    ]
    for tok in v.tokens:
        coords = [(0.0, 0.0)] + [(float(p[0]), float(p[1])) for p in tok.trajectory.points]
        attr = " ".join(f"{sx(x)!r},{sy(y)!r}" for x, y in coords)
        out.append(f'<polyline data-id="{tok.id}" data-source={quoteattr(tok.source.value)} '
                   f'stroke="{COLORS[tok.source]}" points="{attr}"/>')
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


def export_svg(v: Vocabulary, path: str | Path, **kwargs) -> None:
    Path(path).write_text(render_svg(v, **kwargs), encoding="utf-8")
