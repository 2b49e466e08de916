# src/behaviormap/render.py

"""SVG rendering of behavior maps.

Output is built as plain text in a fixed element order (cells p-major, then
legend, then axes), so identical maps render to identical bytes.
"""

from pathlib import Path
from typing import List, Mapping, Optional
from xml.sax.saxutils import escape

from .atlas_engine import BehaviorMap
from .behavior import label_palette

MARGIN_LEFT = 48
MARGIN_BOTTOM = 40
MARGIN_TOP = 28
LEGEND_WIDTH = 140


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def render_svg(
    m: BehaviorMap,
    cell_size: int = 4,
    palette: Optional[Mapping[str, str]] = None,
    title: Optional[str] = None,
) -> str:
    colors = {e["index"]: e["color"] for e in label_palette(m.palette, palette)}
    P, G = m.labels.shape
    plot_w, plot_h = G * cell_size, P * cell_size
    width = MARGIN_LEFT + plot_w + LEGEND_WIDTH
    height = MARGIN_TOP + plot_h + MARGIN_BOTTOM
    title = m.world_id if title is None else title

    out: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{escape(title)}</title>',
        f'<text x="{MARGIN_LEFT}" y="{MARGIN_TOP - 10}" font-family="sans-serif" '
        f'font-size="14">{escape(title)}</text>',
        '<g shape-rendering="crispEdges">',
    ]
    for i in range(P):
        # highest p on top
        y = MARGIN_TOP + (P - 1 - i) * cell_size
        for j in range(G):
            x = MARGIN_LEFT + j * cell_size
            fill = colors[int(m.labels[i, j])]
            out.append(
                f'<rect x="{x}" y="{y}" width="{cell_size}" height="{cell_size}" fill="{fill}"/>'
            )
    out.append("</g>")

    legend_x = MARGIN_LEFT + plot_w + 16
    for n, idx in enumerate(m.present_labels):
        y = MARGIN_TOP + n * 20
        out.append(f'<rect x="{legend_x}" y="{y}" width="12" height="12" fill="{colors[idx]}"/>')
        out.append(
            f'<text x="{legend_x + 18}" y="{y + 11}" font-family="sans-serif" '
            f'font-size="12">{escape(m.palette[idx])}</text>'
        )

    g, p = m.spec.gamma_samples, m.spec.p_samples
    base_y = MARGIN_TOP + plot_h
    out.extend(
        [
            f'<text x="{MARGIN_LEFT}" y="{base_y + 16}" font-family="sans-serif" font-size="11">{_fmt(g[0])}</text>',
            f'<text x="{MARGIN_LEFT + plot_w}" y="{base_y + 16}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{_fmt(g[-1])}</text>',
            f'<text x="{MARGIN_LEFT + plot_w / 2:g}" y="{base_y + 32}" font-family="sans-serif" '
            f'font-size="13" text-anchor="middle">γ</text>',
            f'<text x="{MARGIN_LEFT - 6}" y="{base_y}" font-family="sans-serif" font-size="11" '
            f'text-anchor="end">{_fmt(p[0])}</text>',
            f'<text x="{MARGIN_LEFT - 6}" y="{MARGIN_TOP + 10}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{_fmt(p[-1])}</text>',
            f'<text x="{MARGIN_LEFT - 30}" y="{MARGIN_TOP + plot_h / 2:g}" font-family="sans-serif" '
            f'font-size="13" text-anchor="middle">p</text>',
            "</svg>",
        ]
    )
    return "\n".join(out) + "\n"


def write_svg(m: BehaviorMap, path: Path, **style) -> Path:
    path = Path(path)
    path.write_text(render_svg(m, **style), encoding="utf-8")
    return path
