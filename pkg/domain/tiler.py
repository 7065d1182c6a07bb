"""Rectangle tilings of quadrilateral and annulus components.

Every edge ``(u, v)`` with ``g(u) >= g(v)`` becomes a rectangle of width
``g(u) - g(v)`` (along the potential axis) and height ``c(u, v)(g(u) - g(v))``
(the current through the edge).  Heights are stacked with the conjugate
potential ``h``, which lives on the pieces of the component: crossing an
edge ``a -> b`` from the piece on its left to the piece on its right raises
``h`` by the current ``c(a, b)(g(a) - g(b))``.  Each tile's top edge is its
marker.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from domain.complex import VertexId, edge_key
from domain.decomp import Component, ComponentKind, GluingEdge
from domain.errors import ConsistencyViolation, CoverageGap, GluingMismatch, OverlapDetected, ValidationError
from domain.morse import IndexReport

logger = logging.getLogger(__name__)

TILE_TOL = 1e-9
RASTER = 1000


@dataclass(frozen=True)
class Marker:
    edge: Tuple[VertexId, VertexId]
    level: float
    left: Tuple[float, float]
    right: Tuple[float, float]

    @property
    def length(self) -> float:
        return self.right[0] - self.left[0]


@dataclass(frozen=True)
class RectTile:
    edge: Tuple[VertexId, VertexId]
    origin: Tuple[VertexId, VertexId]
    x0: float
    x1: float
    y0: float
    y1: float
    current: float
    embedded: bool = True

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.current * self.width

    def degenerate(self, eps: float) -> bool:
        return self.current <= eps

    def as_dict(self) -> Dict[str, Any]:
        return {
            "edge": list(self.edge),
            "origin": list(self.origin),
            "x": [self.x0, self.x1],
            "y": [self.y0, self.y1],
            "current": self.current,
            "embedded": self.embedded,
        }


@dataclass(frozen=True)
class Target:
    """``rectangle`` / ``sliced_rectangle`` of height ``extent``, or a cylinder of circumference ``extent``."""

    kind: str
    x0: float
    x1: float
    extent: float

    @property
    def cylinder(self) -> bool:
        return self.kind in ("cylinder", "sliced_cylinder")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def area(self) -> float:
        return self.width * self.extent

    def as_dict(self) -> Dict[str, Any]:
        key = "circumference" if self.cylinder else "height"
        return {"kind": self.kind, "x": [self.x0, self.x1], "width": self.width, key: self.extent, "area": self.area}


@dataclass(frozen=True)
class CoverageReport:
    tile_area: float
    target_area: float
    energy: float
    raster: int
    gaps: int
    overlaps: int
    cross_sections: int
    cross_section_error: float
    boundary_violations: int
    degenerate: int
    tol_rel: float = TILE_TOL
    gap_at: Optional[Tuple[float, float]] = None
    overlap_at: Optional[Tuple[float, float]] = None

    @property
    def area_ok(self) -> bool:
        scale = max(self.energy, 1e-300)
        return (
            abs(self.tile_area - self.energy) <= self.tol_rel * scale
            and abs(self.target_area - self.energy) <= self.tol_rel * scale
        )

    @property
    def cross_sections_ok(self) -> bool:
        return self.cross_section_error <= self.tol_rel

    @property
    def ok(self) -> bool:
        return (
            self.area_ok
            and self.cross_sections_ok
            and self.gaps == 0
            and self.overlaps == 0
            and self.boundary_violations == 0
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "tileArea": self.tile_area,
            "targetArea": self.target_area,
            "energy": self.energy,
            "areaEqualsEnergy": self.area_ok,
            "raster": self.raster,
            "gaps": self.gaps,
            "overlaps": self.overlaps,
            "gapAt": list(self.gap_at) if self.gap_at else None,
            "overlapAt": list(self.overlap_at) if self.overlap_at else None,
            "crossSections": self.cross_sections,
            "crossSectionError": self.cross_section_error,
            "boundaryViolations": self.boundary_violations,
            "degenerateTiles": self.degenerate,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class IdentifiedPoint:
    """Copies of one or more split vertices that are the same point of the quotient."""

    origins: Tuple[VertexId, ...]
    copies: Tuple[VertexId, ...]
    x: float
    spans: Tuple[Tuple[float, float], ...]


@dataclass(frozen=True, eq=False)
class TiledComponent:
    component: Component
    target: Target
    tiles: Tuple[RectTile, ...]
    markers: Tuple[Marker, ...]
    coverage: CoverageReport
    identified: Tuple[IdentifiedPoint, ...] = ()

    def as_dict(self) -> Dict[str, Any]:
        return {
            "component": self.component.as_dict(),
            "target": self.target.as_dict(),
            "tiles": [t.as_dict() for t in self.tiles],
            "identified": [
                {"origins": list(p.origins), "copies": list(p.copies), "x": p.x, "spans": [list(s) for s in p.spans]}
                for p in self.identified
            ],
            "coverage": self.coverage.as_dict(),
        }


@dataclass(frozen=True)
class ConePoint:
    """A cone point; ``angle`` is a rational multiple of pi."""

    vertex: VertexId
    angle: Fraction
    kind: str
    multiplicity: int = 1

    @property
    def radians(self) -> float:
        return float(self.angle) * math.pi

    def as_dict(self) -> Dict[str, Any]:
        return {
            "vertex": self.vertex,
            "kind": self.kind,
            "anglePi": str(self.angle),
            "angle": self.radians,
            "multiplicity": self.multiplicity,
        }


@dataclass(frozen=True, eq=False)
class SurfaceNet:
    components: Tuple[TiledComponent, ...]
    gluing: Tuple[GluingEdge, ...]
    cones: Tuple[ConePoint, ...]
    energy: float
    corners: Tuple[VertexId, ...] = ()
    interior_singular: Mapping[VertexId, int] = field(default_factory=dict)
    boundary_singular: Mapping[VertexId, int] = field(default_factory=dict)

    @property
    def area(self) -> float:
        return math.fsum(tc.target.area for tc in self.components)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "energy": self.energy,
            "area": self.area,
            "components": [tc.as_dict() for tc in self.components],
            "gluing": [edge.as_dict() for edge in self.gluing],
            "cones": [c.as_dict() for c in self.cones],
        }


@dataclass(frozen=True)
class DoublingReport:
    genus: int
    area: float
    cones: Tuple[ConePoint, ...]
    curvature: Fraction
    euler_term: Fraction

    @property
    def balanced(self) -> bool:
        return self.curvature == self.euler_term

    def as_dict(self) -> Dict[str, Any]:
        return {
            "genus": self.genus,
            "area": self.area,
            "cones": [c.as_dict() for c in self.cones],
            "curvaturePi": str(self.curvature),
            "eulerTermPi": str(self.euler_term),
            "balanced": self.balanced,
        }


# ---------------------------------------------------------------------------
# Markers
# ---------------------------------------------------------------------------

def _eps(comp: Component, tol_rel: float) -> float:
    return tol_rel * max(comp.hi - comp.lo, 1e-300)


def _high_loop(comp: Component) -> Tuple[VertexId, ...]:
    def level(loop: Sequence[VertexId]) -> float:
        vals = [comp.constant.get(v) for v in loop]
        return max(x for x in vals if x is not None) if any(x is not None for x in vals) else -math.inf

    return max(comp.loops, key=level)


def _conjugate(comp: Component, root_edge: Optional[Tuple[VertexId, VertexId]]) -> Tuple[Dict[int, float], Dict[Tuple[VertexId, VertexId], int]]:
    owner: Dict[Tuple[VertexId, VertexId], int] = {}
    for pid, cyc in enumerate(comp.pieces):
        for i in range(len(cyc)):
            owner[(cyc[i], cyc[(i + 1) % len(cyc)])] = pid

    root = owner[root_edge] if root_edge is not None else 0
    h = {root: 0.0}
    queue = deque([root])
    while queue:
        pid = queue.popleft()
        cyc = comp.pieces[pid]
        for i in range(len(cyc)):
            a, b = cyc[i], cyc[(i + 1) % len(cyc)]
            other = owner.get((b, a))
            if other is None or other in h:
                continue
            c = comp.conductances.get(edge_key(a, b))
            jump = c * (comp.values[a] - comp.values[b]) if c is not None else 0.0
            h[other] = h[pid] + jump
            queue.append(other)
    return h, owner


def place_markers(comp: Component, *, tol_rel: float = TILE_TOL) -> Tuple[List[Marker], List[RectTile]]:
    """Tiles in chart coordinates and the marker on top of each.

    Quadrilateral charts start at ``y = 0`` on the bottom side; cylinder
    charts start at the piece on the first edge of the high loop, with ``y``
    taken modulo the circumference.

    Raises
    ------
    ConsistencyViolation
        If the tiles below or above some vertex do not stack contiguously.
    """
    cylinder = comp.kind is not None and comp.kind.cylinder
    root_edge = None
    if cylinder:
        loop = _high_loop(comp)
        root_edge = (loop[0], loop[1 % len(loop)])
    h, owner = _conjugate(comp, root_edge)

    tiles: List[RectTile] = []
    for (a, b), c in sorted(comp.conductances.items(), key=lambda item: (str(item[0][0]), str(item[0][1]))):
        u, v = (a, b) if comp.values[a] >= comp.values[b] else (b, a)
        current = c * (comp.values[u] - comp.values[v])
        y0 = h[owner[(u, v)]] if (u, v) in owner else h[owner[(v, u)]] - current
        tiles.append(
            RectTile(
                edge=(u, v),
                origin=(comp.origin[u], comp.origin[v]),
                x0=comp.values[v],
                x1=comp.values[u],
                y0=y0,
                y1=y0 + current,
                current=current,
            )
        )

    extent = chart_extent(comp, tiles, tol_rel=tol_rel)
    if cylinder:
        if extent <= 0:
            raise ConsistencyViolation(f"annulus component #{comp.index} carries no current", {"component": comp.index})
        tiles = [replace(t, y0=t.y0 % extent, y1=t.y0 % extent + t.current) for t in tiles]
    elif tiles:
        shift = min(t.y0 for t in tiles)
        tiles = [replace(t, y0=t.y0 - shift, y1=t.y1 - shift) for t in tiles]

    _check_stacks(comp, tiles, extent if cylinder else None, tol_rel=tol_rel)
    markers = [Marker(edge=t.edge, level=t.x1, left=(t.x0, t.y1), right=(t.x1, t.y1)) for t in tiles]
    logger.debug("tiler.markers component=%d tiles=%d extent=%.12g", comp.index, len(tiles), extent)
    return markers, tiles


def chart_extent(comp: Component, tiles: Iterable[RectTile], *, tol_rel: float = TILE_TOL) -> float:
    """Total current into the high side: the rectangle height or the cylinder circumference."""
    band = _eps(comp, tol_rel)
    return math.fsum(t.current for t in tiles if t.x1 >= comp.hi - band)


def _check_stacks(comp: Component, tiles: Sequence[RectTile], period: Optional[float], *, tol_rel: float) -> None:
    scale = max(math.fsum(t.current for t in tiles), 1e-300)
    gap_tol = tol_rel * scale
    below: Dict[VertexId, List[RectTile]] = {}
    above: Dict[VertexId, List[RectTile]] = {}
    for t in tiles:
        if t.degenerate(gap_tol):
            continue
        below.setdefault(t.edge[0], []).append(t)
        above.setdefault(t.edge[1], []).append(t)

    for stacks in (below, above):
        for v, stack in stacks.items():
            if len(stack) < 2:
                continue
            stack = sorted(stack, key=lambda t: t.y0)
            gaps = 0
            pairs = list(zip(stack, stack[1:]))
            if period is not None:
                pairs.append((stack[-1], stack[0]))
            for prev, nxt in pairs:
                d = nxt.y0 - prev.y1
                if period is not None:
                    d %= period
                    d = min(d, period - d)
                if abs(d) > gap_tol:
                    gaps += 1
            allowed = 0
            if period is not None:
                allowed = 0 if math.fsum(t.current for t in stack) >= period - gap_tol else 1
            elif gaps == 0:
                continue
            if gaps > allowed:
                logger.warning("tiler.inconsistent component=%d vertex=%r gaps=%d", comp.index, v, gaps)
                raise ConsistencyViolation(
                    f"tiles at vertex {v!r} of component #{comp.index} do not stack contiguously",
                    {"component": comp.index, "vertex": v, "gaps": gaps},
                )


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def _y_spans(tile: RectTile, target: Target) -> List[Tuple[float, float]]:
    if not target.cylinder:
        return [(tile.y0, tile.y1)]
    c = target.extent
    if tile.height >= c:
        return [(0.0, c)]
    a = tile.y0 % c
    b = a + tile.height
    if b <= c:
        return [(a, b)]
    return [(a, c), (0.0, b - c)]


def _raster(tiles: Sequence[RectTile], target: Target, n: int, eps: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    xs = target.x0 + (np.arange(n) + 0.5) * (target.width / n)
    ys = (np.arange(n) + 0.5) * (target.extent / n)
    inside = np.zeros((n, n), dtype=np.int32)
    closed = np.zeros((n, n), dtype=np.int32)
    for tile in tiles:
        i0 = np.searchsorted(xs, tile.x0 + eps, "right")
        i1 = np.searchsorted(xs, tile.x1 - eps, "left")
        k0 = np.searchsorted(xs, tile.x0 - eps, "left")
        k1 = np.searchsorted(xs, tile.x1 + eps, "right")
        for ya, yb in _y_spans(tile, target):
            j0 = np.searchsorted(ys, ya + eps, "right")
            j1 = np.searchsorted(ys, yb - eps, "left")
            inside[i0:i1, j0:j1] += 1
            j0 = np.searchsorted(ys, ya - eps, "left")
            j1 = np.searchsorted(ys, yb + eps, "right")
            closed[k0:k1, j0:j1] += 1
    return xs, ys, inside, closed


def _first(mask: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> Optional[Tuple[float, float]]:
    hits = np.argwhere(mask)
    if hits.size == 0:
        return None
    i, j = hits[0]
    return float(xs[i]), float(ys[j])


def _cross_sections(tiles: Sequence[RectTile], target: Target, eps: float) -> Tuple[int, float]:
    if not tiles:
        return 0, 0.0 if target.extent == 0 else 1.0
    breaks: List[float] = []
    for x in sorted({t.x0 for t in tiles} | {t.x1 for t in tiles} | {target.x0, target.x1}):
        if not breaks or x - breaks[-1] > eps:
            breaks.append(x)
    b = np.array(breaks)
    mids = 0.5 * (b[:-1] + b[1:])
    x0 = np.array([t.x0 for t in tiles])
    x1 = np.array([t.x1 for t in tiles])
    heights = np.array([t.current for t in tiles])
    crossing = (x0[None, :] < mids[:, None]) & (mids[:, None] < x1[None, :])
    sums = crossing.astype(float) @ heights
    if target.extent <= 0:
        return len(mids), float(np.max(np.abs(sums), initial=0.0))
    return len(mids), float(np.max(np.abs(sums - target.extent), initial=0.0) / target.extent)


def _boundary_violations(comp: Component, tiles: Sequence[RectTile], target: Target, eps_x: float, eps_y: float) -> int:
    if target.cylinder:
        return 0
    sides = set()
    for loop in comp.loops:
        for i in range(len(loop)):
            a, b = loop[i], loop[(i + 1) % len(loop)]
            ca, cb = comp.constant.get(a), comp.constant.get(b)
            if ca is not None and cb is not None and abs(ca - cb) <= eps_x:
                continue
            sides.add(edge_key(a, b))
    bad = 0
    for t in tiles:
        if edge_key(*t.edge) not in sides:
            continue
        if abs(t.y0) > eps_y and abs(t.y1 - target.extent) > eps_y:
            bad += 1
    return bad


def verify_coverage(
    comp: Component,
    tiles: Sequence[RectTile],
    target: Target,
    *,
    raster: int = RASTER,
    tol_rel: float = TILE_TOL,
) -> CoverageReport:
    """Area, raster coverage, cross-sections and boundary preservation in one pass."""
    energy = comp.energy()
    scale = max(target.width, target.extent, 1e-300)
    eps = tol_rel * scale
    live = [t for t in tiles if not t.degenerate(eps)]
    xs, ys, inside, closed = _raster(live, target, raster, eps)
    gaps = closed == 0
    overlaps = inside >= 2
    count, error = _cross_sections(live, target, eps)
    report = CoverageReport(
        tile_area=math.fsum(t.area for t in tiles),
        target_area=target.area,
        energy=energy,
        raster=raster,
        gaps=int(gaps.sum()),
        overlaps=int(overlaps.sum()),
        cross_sections=count,
        cross_section_error=error,
        boundary_violations=_boundary_violations(comp, live, target, _eps(comp, tol_rel), eps),
        degenerate=len(tiles) - len(live),
        tol_rel=tol_rel,
        gap_at=_first(gaps, xs, ys),
        overlap_at=_first(overlaps, xs, ys),
    )
    logger.info(
        "tiler.coverage component=%d gaps=%d overlaps=%d area=%.12g energy=%.12g",
        comp.index, report.gaps, report.overlaps, report.tile_area, energy,
    )
    return report


def _raise_for(report: CoverageReport, comp: Component) -> None:
    details: Dict[str, Any] = {"component": comp.index, **report.as_dict()}
    if report.overlaps:
        logger.warning("tiler.overlap component=%d at=%s", comp.index, report.overlap_at)
        raise OverlapDetected(f"tiles of component #{comp.index} overlap near {report.overlap_at}", details)
    if report.gaps:
        logger.warning("tiler.gap component=%d at=%s", comp.index, report.gap_at)
        raise CoverageGap(f"tiles of component #{comp.index} leave a gap near {report.gap_at}", details)
    if not report.area_ok:
        raise CoverageGap(
            f"component #{comp.index}: tile area {report.tile_area!r}, target {report.target_area!r}, "
            f"energy {report.energy!r}",
            details,
        )
    if not report.cross_sections_ok:
        raise CoverageGap(f"component #{comp.index}: level cross-sections differ by {report.cross_section_error:.3e}", details)
    if report.boundary_violations:
        raise CoverageGap(
            f"component #{comp.index}: {report.boundary_violations} boundary tiles miss the target side", details
        )


# ---------------------------------------------------------------------------
# Tiling
# ---------------------------------------------------------------------------

def _identified_points(comp: Component, tiles: Sequence[RectTile], eps: float) -> List[IdentifiedPoint]:
    points: List[IdentifiedPoint] = []
    for origin, copies in sorted(comp.identified.items(), key=lambda item: str(item[0])):
        spans = []
        for copy in copies:
            ys = [(t.y0, t.y1) for t in tiles if copy in t.edge and not t.degenerate(eps)]
            if ys:
                spans.append((min(y for y, _ in ys), max(y for _, y in ys)))
        points.append(IdentifiedPoint(origins=(origin,), copies=copies, x=comp.values[copies[0]], spans=tuple(spans)))

    merged: List[IdentifiedPoint] = []
    for p in points:
        for i, q in enumerate(merged):
            if abs(p.x - q.x) <= eps and any(a0 <= b1 + eps and b0 <= a1 + eps for a0, a1 in p.spans for b0, b1 in q.spans):
                merged[i] = IdentifiedPoint(
                    origins=q.origins + p.origins, copies=q.copies + p.copies, x=q.x, spans=q.spans + p.spans
                )
                break
        else:
            merged.append(p)
    return merged


def _tile(comp: Component, kind: str, *, raster: int, tol_rel: float) -> TiledComponent:
    markers, tiles = place_markers(comp, tol_rel=tol_rel)
    target = Target(kind=kind, x0=comp.lo, x1=comp.hi, extent=chart_extent(comp, tiles, tol_rel=tol_rel))
    identified: List[IdentifiedPoint] = []
    if comp.identified:
        split = {copy for copies in comp.identified.values() for copy in copies}
        tiles = [replace(t, embedded=not (t.edge[0] in split or t.edge[1] in split)) for t in tiles]
        identified = _identified_points(comp, tiles, tol_rel * max(target.width, target.extent, 1e-300))
    coverage = verify_coverage(comp, tiles, target, raster=raster, tol_rel=tol_rel)
    _raise_for(coverage, comp)
    logger.info(
        "tiler.tiled component=%d kind=%s tiles=%d extent=%.12g", comp.index, kind, len(tiles), target.extent
    )
    return TiledComponent(
        component=comp,
        target=target,
        tiles=tuple(tiles),
        markers=tuple(markers),
        coverage=coverage,
        identified=tuple(identified),
    )


def tile_quadrilateral(comp: Component, *, raster: int = RASTER, tol_rel: float = TILE_TOL) -> TiledComponent:
    """Tile a quadrilateral component onto a ``(hi - lo) x H`` rectangle.

    Raises
    ------
    CoverageGap, OverlapDetected
        If the verified tiling fails a coverage or area check.
    """
    if comp.kind != ComponentKind.QUADRILATERAL:
        raise ValidationError(f"component #{comp.index} is {comp.kind}, not a quadrilateral")
    return _tile(comp, "rectangle", raster=raster, tol_rel=tol_rel)


def tile_sliced_quadrilateral(comp: Component, *, raster: int = RASTER, tol_rel: float = TILE_TOL) -> TiledComponent:
    """Tile a sliced quadrilateral; tiles at identified copies are not embedded in the quotient."""
    if comp.kind not in (ComponentKind.SLICED_QUADRILATERAL, ComponentKind.QUADRILATERAL):
        raise ValidationError(f"component #{comp.index} is {comp.kind}, not a sliced quadrilateral")
    kind = "sliced_rectangle" if comp.identified else "rectangle"
    return _tile(comp, kind, raster=raster, tol_rel=tol_rel)


def tile_annulus(comp: Component, *, raster: int = RASTER, tol_rel: float = TILE_TOL) -> TiledComponent:
    """Tile an annulus component onto a cylinder with ``y`` taken modulo the circumference."""
    if comp.kind not in (ComponentKind.ANNULUS, ComponentKind.SINGULAR_ANNULUS):
        raise ValidationError(f"component #{comp.index} is {comp.kind}, not an annulus")
    kind = "sliced_cylinder" if comp.identified else "cylinder"
    return _tile(comp, kind, raster=raster, tol_rel=tol_rel)


def tile_component(comp: Component, *, raster: int = RASTER, tol_rel: float = TILE_TOL) -> TiledComponent:
    if comp.kind == ComponentKind.QUADRILATERAL:
        return tile_quadrilateral(comp, raster=raster, tol_rel=tol_rel)
    if comp.kind == ComponentKind.SLICED_QUADRILATERAL:
        return tile_sliced_quadrilateral(comp, raster=raster, tol_rel=tol_rel)
    return tile_annulus(comp, raster=raster, tol_rel=tol_rel)


# ---------------------------------------------------------------------------
# Surface
# ---------------------------------------------------------------------------

def assemble_surface(
    tiled: Sequence[TiledComponent],
    gluing: Sequence[GluingEdge],
    report: IndexReport,
    *,
    tol_rel: float = TILE_TOL,
) -> SurfaceNet:
    """Glue the tiled components along their level seams and collect cone points.

    Corners get ``pi/2``, a split vertex ``pi/2`` per copy and an interior
    saddle ``pi * Sgc``.  A boundary singular vertex that no component splits
    gets its whole angle ``pi * Sgc``, summed over the components that meet
    there.  Points where a cut level reaches the Neumann boundary are not cones:
    the two sides contribute ``pi/2`` each.

    Raises
    ------
    GluingMismatch
        If a seam refers to a component that was not tiled or its two sides
        have different lengths.
    """
    indices = {tc.component.index for tc in tiled}
    for edge in gluing:
        missing = (set(edge.upper) | set(edge.lower)) - indices
        if missing:
            raise GluingMismatch(
                f"seam at level {edge.level!r} refers to untiled components {sorted(missing)}",
                {"level": edge.level, "missing": sorted(missing)},
            )
        if not edge.matched(tol_rel):
            raise GluingMismatch(
                f"seam at level {edge.level!r} has lengths {edge.length_upper!r} and {edge.length_lower!r}",
                {"level": edge.level, "upper": edge.length_upper, "lower": edge.length_lower},
            )

    interior = {v: report.per_vertex[v].sgc for v in report.interior_singular}
    boundary = {v: report.per_vertex[v].sgc for v in report.boundary_singular}
    cones: List[ConePoint] = [ConePoint(vertex=v, angle=Fraction(1, 2), kind="corner") for v in report.corners]
    sliced = set()
    for tc in tiled:
        for origin, copies in sorted(tc.component.identified.items(), key=lambda item: str(item[0])):
            if origin in interior:
                continue
            sliced.add(origin)
            cones.append(ConePoint(vertex=origin, angle=Fraction(len(copies), 2), kind="slice"))
    cones.extend(
        ConePoint(vertex=v, angle=Fraction(sgc), kind="boundary_singular")
        for v, sgc in boundary.items()
        if v not in sliced
    )
    cones.extend(ConePoint(vertex=v, angle=Fraction(sgc), kind="saddle") for v, sgc in interior.items())

    net = SurfaceNet(
        components=tuple(tiled),
        gluing=tuple(gluing),
        cones=tuple(cones),
        energy=math.fsum(tc.coverage.energy for tc in tiled),
        corners=tuple(report.corners),
        interior_singular=interior,
        boundary_singular=boundary,
    )
    logger.info("tiler.surface components=%d seams=%d cones=%d", len(tiled), len(gluing), len(cones))
    return net


def doubling_report(net: SurfaceNet, m: int, energy: float) -> DoublingReport:
    """Genus, area and cone points of the closed surface made of two copies of *net*.

    The curvature balance ``sum mult * (2 - angle/pi) == 2 (2 - 2 genus)`` is
    carried exactly in units of pi.
    """
    genus = m - 1
    cones: List[ConePoint] = [ConePoint(vertex=v, angle=Fraction(1), kind="corner") for v in net.corners]
    cones.extend(ConePoint(vertex=v, angle=Fraction(2 * sgc), kind="boundary_singular") for v, sgc in net.boundary_singular.items())
    cones.extend(
        ConePoint(vertex=v, angle=Fraction(sgc), kind="saddle", multiplicity=2) for v, sgc in net.interior_singular.items()
    )
    curvature = sum((c.multiplicity * (2 - c.angle) for c in cones), Fraction(0))
    return DoublingReport(
        genus=genus,
        area=2 * energy,
        cones=tuple(cones),
        curvature=curvature,
        euler_term=Fraction(2 * (2 - 2 * genus)),
    )
