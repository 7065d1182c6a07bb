"""SVG rendering of tiled components.

The builder tracks the drawing bounds as items are added and writes the
viewBox on :meth:`SVG.render`; chart ``y`` grows upwards, so it is flipped on
output.  Elements are emitted in insertion order.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

from domain.tiler import TiledComponent

PREAMBLE = (
    '<?xml version="1.0" standalone="no"?>\n'
    '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
    'width="{width:.2f}" height="{height:.2f}" viewBox="{x:.6f} {y:.6f} {vw:.6f} {vh:.6f}">\n'
)
POSTAMBLE = "</svg>\n"

_FILL = "#cfe3f5"
_STROKE = "#1f3b57"


class SVG:
    def __init__(self, scale: float = 400.0):
        self.scale = scale
        self.min_x: Optional[float] = None
        self.max_x: Optional[float] = None
        self.min_y: Optional[float] = None
        self.max_y: Optional[float] = None
        self.commands: List[str] = []

    def require(self, x: float, y: float) -> None:
        if self.min_x is None:
            self.min_x = self.max_x = x
            self.min_y = self.max_y = y
        else:
            self.min_x = min(self.min_x, x)
            self.max_x = max(self.max_x, x)
            self.min_y = min(self.min_y, y)
            self.max_y = max(self.max_y, y)

    def rect(self, x0: float, y0: float, x1: float, y1: float, *, fill: str = _FILL, opacity: float = 1.0, title: str = "") -> None:
        self.require(x0, y0)
        self.require(x1, y1)
        tip = f"<title>{escape(title)}</title>" if title else ""
        self.commands.append(
            f'<rect x="{x0:.9g}" y="{-y1:.9g}" width="{x1 - x0:.9g}" height="{y1 - y0:.9g}" '
            f'fill="{fill}" fill-opacity="{opacity:g}" stroke="{_STROKE}" '
            f'stroke-width="{1.0 / self.scale:.6g}">{tip}</rect>'
        )

    def line(self, points: Sequence[Tuple[float, float]], *, color: str = _STROKE, dashed: bool = False) -> None:
        for x, y in points:
            self.require(x, y)
        dash = f' stroke-dasharray="{4.0 / self.scale:.6g},{3.0 / self.scale:.6g}"' if dashed else ""
        self.commands.append(
            '<polyline points="%s" fill="none" stroke="%s" stroke-width="%.6g"%s/>'
            % (" ".join(f"{x:.9g},{-y:.9g}" for x, y in points), color, 1.5 / self.scale, dash)
        )

    def circle(self, x: float, y: float, radius: float, *, color: str = "#b0302a") -> None:
        self.require(x - radius, y - radius)
        self.require(x + radius, y + radius)
        self.commands.append(
            f'<circle cx="{x:.9g}" cy="{-y:.9g}" r="{radius:.6g}" fill="none" stroke="{color}" '
            f'stroke-width="{1.5 / self.scale:.6g}"/>'
        )

    def text(self, x: float, y: float, label: str, *, size: float = 10.0) -> None:
        self.require(x, y)
        self.commands.append(
            f'<text x="{x:.9g}" y="{-y:.9g}" font-size="{size / self.scale:.6g}" '
            f'font-family="sans-serif" text-anchor="middle">{escape(label)}</text>'
        )

    def render(self) -> str:
        if self.min_x is None:
            self.require(0.0, 0.0)
        pad = max(self.max_x - self.min_x, self.max_y - self.min_y, 1e-9) * 0.05
        vx, vw = self.min_x - pad, self.max_x - self.min_x + 2 * pad
        vy, vh = -self.max_y - pad, self.max_y - self.min_y + 2 * pad
        head = PREAMBLE.format(width=vw * self.scale, height=vh * self.scale, x=vx, y=vy, vw=vw, vh=vh)
        return head + "".join(item + "\n" for item in self.commands) + POSTAMBLE


def angle_label(angle: Fraction) -> str:
    """``pi``-multiple as text: ``π/2``, ``π``, ``4π``."""
    num, den = angle.numerator, angle.denominator
    head = "π" if num == 1 else f"{num}π"
    return head if den == 1 else f"{head}/{den}"


def render_component(tc: TiledComponent, *, scale: float = 400.0, labels: bool = True) -> str:
    """Tiles, dashed seams on level sides, and circled cone points of one component."""
    svg = SVG(scale=scale)
    target = tc.target
    comp = tc.component
    extent = target.extent

    for tile in tc.tiles:
        if tile.width <= 0 or tile.height <= 0:
            continue
        spans = [(tile.y0, tile.y1)]
        if target.cylinder and tile.y1 > extent:
            spans = [(tile.y0, extent), (0.0, tile.y1 - extent)]
        title = f"{tile.origin[0]}-{tile.origin[1]}"
        for y0, y1 in spans:
            svg.rect(tile.x0, y0, tile.x1, y1, opacity=1.0 if tile.embedded else 0.45, title=title)
            if labels:
                svg.text(0.5 * (tile.x0 + tile.x1), 0.5 * (y0 + y1), title, size=8.0)

    for x in (target.x0, target.x1):
        if comp.level_edges and any(abs(v - x) <= 1e-9 * max(target.width, 1e-300) for v in comp.level_edges.values()):
            svg.line([(x, 0.0), (x, extent)], dashed=True)

    radius = 0.012 * max(target.width, extent, 1e-9)
    for v in comp.corners:
        ys = [t.y0 for t in tc.tiles if v in t.edge] + [t.y1 for t in tc.tiles if v in t.edge]
        y = 0.0 if ys and min(ys) <= radius else extent
        svg.circle(comp.values[v], y, radius)
        svg.text(comp.values[v], y + 1.5 * radius, angle_label(Fraction(1, 2)))
    for point in tc.identified:
        for y0, y1 in point.spans:
            svg.circle(point.x, 0.5 * (y0 + y1), radius)
        label = angle_label(Fraction(len(point.copies), 2))
        if point.spans:
            svg.text(point.x, 0.5 * sum(point.spans[0]) + 1.5 * radius, label)
    return svg.render()
