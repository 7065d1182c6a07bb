"""Sign-change indices, the boundary index identity and level-curve tracing."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Set, Tuple, Union

import networkx as nx

from domain.bvp import Potential
from domain.complex import BoundarySpec, CellComplex, EdgeKey, VertexId, boundary_runs, count_arc_endpoints, edge_key, id_key
from domain.errors import DegenerateLevel, IndexMismatch, MissingValue, SideUndefined, TieError, ValidationError
from domain.refine import RefinedComplex, insert_level_vertices

logger = logging.getLogger(__name__)

TIE_TOL = 1e-9

Values = Union[Potential, Mapping[VertexId, float]]


@dataclass(frozen=True)
class VertexIndex:
    sgc: int
    index: Fraction
    boundary: bool


@dataclass(frozen=True)
class IndexReport:
    per_vertex: Dict[VertexId, VertexIndex]
    interior_singular: Tuple[VertexId, ...]
    boundary_singular: Tuple[VertexId, ...]
    total: Fraction
    t: int
    euler: int
    expected: Fraction
    corners: Tuple[VertexId, ...] = ()
    boundary_components: int = 1
    perturbed: bool = False

    @property
    def singular_vertices(self) -> Tuple[VertexId, ...]:
        return self.interior_singular + self.boundary_singular

    def as_dict(self) -> Dict[str, Any]:
        return {
            "perVertex": {str(v): {"sgc": vi.sgc, "index": str(vi.index)} for v, vi in self.per_vertex.items()},
            "interiorSingular": list(self.interior_singular),
            "boundarySingular": list(self.boundary_singular),
            "totalIndex": str(self.total),
            "arcEndpointCount": self.t,
            "euler": self.euler,
            "expected": str(self.expected),
            "corners": list(self.corners),
            "perturbed": self.perturbed,
        }


def _values(g: Values) -> Mapping[VertexId, float]:
    return g.values if isinstance(g, Potential) else g


def _scale(g: Values) -> float:
    if isinstance(g, Potential):
        return g.k
    return max((abs(x) for x in g.values()), default=1.0) or 1.0


def _value(values: Mapping[VertexId, float], v: VertexId) -> float:
    try:
        return values[v]
    except KeyError:
        raise MissingValue(f"no value given for vertex {v!r}", {"vertex": v}) from None


# ---------------------------------------------------------------------------
# Indices
# ---------------------------------------------------------------------------

def neighbour_signs(
    cx: CellComplex, g: Values, v: VertexId, *, tol_rel: float = TIE_TOL, tie_perturb: bool = False
) -> List[int]:
    """Signs of ``g(w) - g(v)`` over the counterclockwise star of *v*."""
    values = _values(g)
    gv = _value(values, v)
    band = tol_rel * _scale(g)
    signs: List[int] = []
    for w in cx.vertex_star(v):
        d = _value(values, w) - gv
        if abs(d) <= band:
            if not tie_perturb:
                raise TieError(
                    f"vertex {v!r} ties with neighbour {w!r} (difference {d:.3e})",
                    {"vertex": v, "neighbour": w},
                )
            signs.append(1 if id_key(w) > id_key(v) else -1)
        else:
            signs.append(1 if d > 0 else -1)
    return signs


def sign_changes(
    cx: CellComplex, g: Values, v: VertexId, *, tol_rel: float = TIE_TOL, tie_perturb: bool = False
) -> int:
    """Sgc(v): cyclic for interior vertices, along the open fan on the boundary."""
    signs = neighbour_signs(cx, g, v, tol_rel=tol_rel, tie_perturb=tie_perturb)
    changes = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    if signs and not cx.is_boundary(v) and signs[-1] != signs[0]:
        changes += 1
    return changes


def _index(sgc: int, boundary: bool) -> Fraction:
    return Fraction(1 - sgc, 2) if boundary else 1 - Fraction(sgc, 2)


def vertex_index(
    cx: CellComplex, g: Values, v: VertexId, *, tol_rel: float = TIE_TOL, tie_perturb: bool = False
) -> Fraction:
    """``1 - Sgc/2`` inside, ``(1 - Sgc)/2`` on the boundary."""
    return _index(sign_changes(cx, g, v, tol_rel=tol_rel, tie_perturb=tie_perturb), cx.is_boundary(v))


def index_formula_check(
    cx: CellComplex,
    spec: BoundarySpec,
    g: Values,
    *,
    tol_rel: float = TIE_TOL,
    tie_perturb: bool = False,
) -> IndexReport:
    """Sum the indices off the constant arcs and compare with ``chi - t/4``.

    Raises
    ------
    TieError
        If a vertex ties with a neighbour and ``tie_perturb`` is off.
    IndexMismatch
        If the total differs from ``chi - t/4``.
    """
    runs = boundary_runs(cx, spec)
    t = count_arc_endpoints(runs)
    corners = tuple(v for run in runs for v in run.endpoints)

    per_vertex: Dict[VertexId, VertexIndex] = {}
    for v in cx.vertex_ids:
        if spec.dirichlet_value(v) is not None:
            continue
        sgc = sign_changes(cx, g, v, tol_rel=tol_rel, tie_perturb=tie_perturb)
        boundary = cx.is_boundary(v)
        per_vertex[v] = VertexIndex(sgc=sgc, index=_index(sgc, boundary), boundary=boundary)

    total = sum((vi.index for vi in per_vertex.values()), Fraction(0))
    euler = cx.euler_characteristic()
    expected = euler - Fraction(t, 4)
    report = IndexReport(
        per_vertex=per_vertex,
        interior_singular=tuple(v for v, vi in per_vertex.items() if vi.index < 0 and not vi.boundary),
        boundary_singular=tuple(v for v, vi in per_vertex.items() if vi.index < 0 and vi.boundary),
        total=total,
        t=t,
        euler=euler,
        expected=expected,
        corners=corners,
        boundary_components=len(cx.loops),
        perturbed=tie_perturb,
    )
    logger.info(
        "morse.index total=%s expected=%s t=%d interior_singular=%d boundary_singular=%d",
        total, expected, t, len(report.interior_singular), len(report.boundary_singular),
    )
    if total != expected:
        logger.warning("morse.index_mismatch total=%s expected=%s", total, expected)
        raise IndexMismatch(
            f"index total {total} differs from chi - t/4 = {expected}",
            {"total": str(total), "expected": str(expected), "euler": euler, "t": t},
        )
    return report


def group_levels(values: Iterable[float], *, k: float, tol_rel: float = TIE_TOL) -> List[float]:
    """Sorted distinct values, merging those within ``tol_rel * k`` of each other."""
    grouped: List[float] = []
    for x in sorted(values):
        if not grouped or x - grouped[-1] > tol_rel * k:
            grouped.append(x)
    return grouped


# ---------------------------------------------------------------------------
# Level curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelComponent:
    value: float
    vertices: Tuple[VertexId, ...]
    chords: Tuple[EdgeKey, ...]
    closed: bool
    chains: Tuple[Tuple[VertexId, ...], ...]
    arc_count: Mapping[VertexId, int]
    singular: Tuple[VertexId, ...]
    boundary_ends: Tuple[VertexId, ...] = ()


@dataclass(frozen=True)
class LevelCurve:
    value: float
    level: int
    components: Tuple[LevelComponent, ...]
    refined: RefinedComplex = field(compare=False, repr=False)

    @property
    def singular_vertices(self) -> Tuple[VertexId, ...]:
        return tuple(v for comp in self.components for v in comp.singular)

    def polyline(self, chain: Sequence[VertexId]) -> List[Tuple[float, float]]:
        """Chain coordinates with the diagonal bend points filled in."""
        coords, bends = self.refined.coords, self.refined.chord_bends
        points = [coords[chain[0]]]
        for a, b in zip(chain, chain[1:]):
            if (a, b) in bends:
                points.append(bends[(a, b)])
            points.append(coords[b])
        return points


def _chains(graph: nx.Graph, breakpoints: Set[VertexId]) -> List[Tuple[VertexId, ...]]:
    """Split a chord graph into paths between breakpoints, then leftover cycles."""
    chains: List[Tuple[VertexId, ...]] = []
    seen: Set[EdgeKey] = set()
    order = sorted(graph.nodes, key=id_key)

    def walk(start: VertexId, first: VertexId, stop: Set[VertexId]) -> Tuple[VertexId, ...]:
        chain = [start]
        prev, cur = start, first
        seen.add(edge_key(start, first))
        while cur not in stop:
            chain.append(cur)
            nxt = next(w for w in graph.neighbors(cur) if w != prev)
            seen.add(edge_key(cur, nxt))
            prev, cur = cur, nxt
        chain.append(cur)
        return tuple(chain)

    for start in order:
        if start not in breakpoints:
            continue
        for nbr in sorted(graph.neighbors(start), key=id_key):
            if edge_key(start, nbr) not in seen:
                chains.append(walk(start, nbr, breakpoints))
    for start in order:
        for nbr in sorted(graph.neighbors(start), key=id_key):
            if edge_key(start, nbr) not in seen:
                chains.append(walk(start, nbr, {start}))
    return chains


def trace_level_curve(rc: RefinedComplex, s: float) -> LevelCurve:
    """Connected pieces of the level set ``{g = s}`` with their singular vertices.

    Level vertices are inserted first when ``s`` is not yet a cut level of
    *rc*; the refined complex actually traced is kept on the result.
    """
    rc = insert_level_vertices(rc, s)
    li = rc.level_index(s)
    if li is None:
        raise DegenerateLevel(f"level {s!r} is not strictly between 0 and {rc.k!r}", {"level": s})

    graph = nx.Graph()
    for chord in rc.chords:
        if chord.level == li:
            graph.add_edge(chord.a, chord.b)

    net = rc.network
    components: List[LevelComponent] = []
    for nodes in sorted(nx.connected_components(graph), key=lambda c: min(id_key(v) for v in c)):
        sub = graph.subgraph(nodes)
        degree = dict(sub.degree())
        on_boundary = {v for v in nodes if net.is_boundary(v)}
        singular = tuple(
            sorted(
                (v for v in nodes if degree[v] >= (2 if v in on_boundary else 4)),
                key=id_key,
            )
        )
        breakpoints = {v for v in nodes if degree[v] != 2 or v in on_boundary}
        components.append(
            LevelComponent(
                value=rc.levels[li],
                vertices=tuple(sorted(nodes, key=id_key)),
                chords=tuple(sorted((edge_key(a, b) for a, b in sub.edges), key=lambda e: (id_key(e[0]), id_key(e[1])))),
                closed=not on_boundary,
                chains=tuple(_chains(sub, breakpoints)),
                arc_count=degree,
                singular=singular,
                boundary_ends=tuple(sorted(on_boundary, key=id_key)),
            )
        )
    logger.debug("morse.level s=%.9g components=%d chords=%d", s, len(components), graph.number_of_edges())
    return LevelCurve(value=rc.levels[li], level=li, components=tuple(components), refined=rc)


def side_flux(rc: RefinedComplex, x: VertexId, s: float, side: str) -> float:
    """Signed flux from *x* into its neighbours strictly above (``upper``) or below ``s``."""
    band = rc.tol * rc.k
    values = rc.values
    gx = values[x]
    terms = []
    for y, c in rc.network.neighbors(x).items():
        d = values[y] - s
        if (side == "upper" and d > band) or (side == "lower" and d < -band):
            terms.append(c * (gx - values[y]))
    return math.fsum(terms)


def flux_length(
    rc: RefinedComplex,
    curve: Union[LevelComponent, Iterable[VertexId]],
    side: str = "lower",
) -> float:
    """Flux-gradient length of *curve*, measured from the chosen side.

    Raises
    ------
    SideUndefined
        If no vertex of the curve has a neighbour on that side.
    """
    if side not in ("upper", "lower"):
        raise ValidationError(f"side must be 'upper' or 'lower', got {side!r}")
    if isinstance(curve, LevelComponent):
        vertices, s = curve.vertices, curve.value
    else:
        vertices = tuple(curve)
        if not vertices:
            raise ValidationError("curve has no vertices")
        s = rc.values[vertices[0]]
    band = rc.tol * rc.k
    values = rc.values
    if not any(
        (values[y] - s > band) if side == "upper" else (values[y] - s < -band)
        for x in vertices
        for y in rc.network.neighbors(x)
    ):
        raise SideUndefined(f"the curve at level {s!r} has no {side} side", {"level": s, "side": side})
    return abs(math.fsum(side_flux(rc, x, s, side) for x in vertices))
