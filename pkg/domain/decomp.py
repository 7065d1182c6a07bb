"""Cut the region at its singular levels and classify the pieces.

Pieces of the refined complex are grouped by value band, then joined across
shared edges.  Inside one component, a vertex whose incident pieces fall
into several separate fans is split into copies ``"v#0"``, ``"v#1"``, ...
(one per wedge), which turns every component boundary into simple loops.
The copies remember their origin so tiles can be identified again later.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx

from domain.complex import BoundarySpec, EdgeKey, Network, Run, VertexId, constant_runs, count_arc_endpoints, edge_key, id_key
from domain.errors import ConsistencyViolation, GluingMismatch, UnclassifiableComponent, ValidationError
from domain.morse import IndexReport, group_levels, trace_level_curve
from domain.refine import RefinedComplex, insert_level_vertices

logger = logging.getLogger(__name__)

GLUING_TOL = 1e-9


class ComponentKind(str, Enum):
    QUADRILATERAL = "quadrilateral"
    SLICED_QUADRILATERAL = "sliced_quadrilateral"
    ANNULUS = "annulus"
    SINGULAR_ANNULUS = "singular_annulus"

    @property
    def cylinder(self) -> bool:
        return self in (ComponentKind.ANNULUS, ComponentKind.SINGULAR_ANNULUS)


@dataclass(frozen=True, eq=False)
class Component:
    """One connected piece of a band, after wedge splitting.

    Vertex ids are copy ids: the refined id itself, or ``"v#j"`` for the
    ``j``-th wedge of a split vertex ``v``.
    """

    index: int
    band: int
    value_band: Tuple[float, float]
    pieces: Tuple[Tuple[VertexId, ...], ...]
    cells: Tuple[int, ...]
    origin: Mapping[VertexId, VertexId]
    values: Mapping[VertexId, float]
    conductances: Mapping[EdgeKey, float]
    level_edges: Mapping[EdgeKey, float]
    loops: Tuple[Tuple[VertexId, ...], ...]
    constant: Mapping[VertexId, Optional[float]]
    runs: Tuple[Run, ...]
    euler: int
    t: int
    identified: Mapping[VertexId, Tuple[VertexId, ...]] = field(default_factory=dict)
    kind: Optional[ComponentKind] = None

    @property
    def corners(self) -> Tuple[VertexId, ...]:
        return tuple(v for run in self.runs for v in run.endpoints)

    @property
    def lo(self) -> float:
        return min(self.values.values())

    @property
    def hi(self) -> float:
        return max(self.values.values())

    @cached_property
    def network(self) -> Network:
        adjacency: Dict[VertexId, Dict[VertexId, float]] = {v: {} for v in self.origin}
        for (a, b), c in self.conductances.items():
            adjacency[a][b] = c
            adjacency[b][a] = c
        return Network(adjacency=adjacency, boundary=frozenset(v for loop in self.loops for v in loop))

    def energy(self) -> float:
        return math.fsum(c * (self.values[a] - self.values[b]) ** 2 for (a, b), c in self.conductances.items())

    def as_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "band": self.band,
            "valueBand": list(self.value_band),
            "kind": self.kind.value if self.kind else None,
            "euler": self.euler,
            "t": self.t,
            "corners": list(self.corners),
            "cells": list(self.cells),
            "identifications": {str(o): list(c) for o, c in self.identified.items()},
            "energy": self.energy(),
        }


@dataclass(frozen=True)
class Subdomain:
    index: int
    value_band: Tuple[float, float]
    components: Tuple[Component, ...]


@dataclass(frozen=True)
class GluingArc:
    vertices: Tuple[VertexId, ...]
    upper_component: Optional[int]
    lower_component: Optional[int]
    length_upper: float
    length_lower: float


@dataclass(frozen=True)
class WedgeFlux:
    vertex: VertexId
    copy: VertexId
    component: int
    side: str
    flux: float


@dataclass(frozen=True)
class GluingEdge:
    """One connected level-curve component and the flux it carries on each side."""

    level: float
    vertices: Tuple[VertexId, ...]
    upper: Dict[int, float]
    lower: Dict[int, float]
    length_upper: float
    length_lower: float
    arcs: Tuple[GluingArc, ...] = ()
    wedges: Tuple[WedgeFlux, ...] = ()
    closed: bool = False

    def matched(self, tol_rel: float = GLUING_TOL) -> bool:
        scale = max(self.length_upper, self.length_lower, 1e-300)
        if abs(self.length_upper - self.length_lower) > tol_rel * scale:
            return False
        return all(abs(arc.length_upper - arc.length_lower) <= tol_rel * scale for arc in self.arcs)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "closed": self.closed,
            "vertices": list(self.vertices),
            "upper": {str(i): v for i, v in self.upper.items()},
            "lower": {str(i): v for i, v in self.lower.items()},
            "lengthUpper": self.length_upper,
            "lengthLower": self.length_lower,
            "arcs": [
                {
                    "vertices": list(arc.vertices),
                    "upperComponent": arc.upper_component,
                    "lowerComponent": arc.lower_component,
                    "lengthUpper": arc.length_upper,
                    "lengthLower": arc.length_lower,
                }
                for arc in self.arcs
            ],
            "wedges": [
                {"vertex": w.vertex, "copy": w.copy, "component": w.component, "side": w.side, "flux": w.flux}
                for w in self.wedges
            ],
        }


# ---------------------------------------------------------------------------
# Singular values
# ---------------------------------------------------------------------------

def singular_values(report: IndexReport, g: Any, *, tol_rel: float = GLUING_TOL) -> List[float]:
    """``[0, p_1, ..., p_{n-1}, k]`` from the values at the singular vertices."""
    values = g.values if hasattr(g, "values") and not isinstance(g, Mapping) else g
    k = g.k if hasattr(g, "k") else max(values.values())
    inner = group_levels((values[v] for v in report.singular_vertices), k=k, tol_rel=tol_rel)
    band = tol_rel * k
    return [0.0] + [s for s in inner if band < s < k - band] + [float(k)]


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------

def _band_of(levels: Sequence[float], lo: float, hi: float) -> int:
    mid = 0.5 * (lo + hi)
    return min(max(bisect.bisect_right(levels, mid) - 1, 0), len(levels) - 2)


def extract_subdomains(
    rc: RefinedComplex,
    spec: BoundarySpec,
    p: Sequence[float],
) -> List[Subdomain]:
    """Components of ``{p_i < g < p_{i+1}}`` for every band, wedge-split and classified.

    Missing cut levels are inserted into *rc* first; the extended potential is
    the one carried by *rc*.

    Raises
    ------
    DegenerateLevel
        If a cut level runs along an edge.
    UnclassifiableComponent
        If a component is neither a quadrilateral nor an annulus.
    """
    levels = sorted(float(s) for s in p)
    if len(levels) < 2:
        raise ValidationError("at least the two values 0 and k are required")
    for s in levels[1:-1]:
        rc = insert_level_vertices(rc, s)

    pieces = rc.pieces
    values = rc.values
    bands = []
    for piece in pieces:
        vals = [values[v] for v in piece.vertices]
        bands.append(_band_of(levels, min(vals), max(vals)))

    edge_pieces: Dict[EdgeKey, List[int]] = {}
    for pid, piece in enumerate(pieces):
        for a, b in piece.directed_edges():
            edge_pieces.setdefault(edge_key(a, b), []).append(pid)

    graph = nx.Graph()
    graph.add_nodes_from(range(len(pieces)))
    for ids in edge_pieces.values():
        for i in ids:
            for j in ids:
                if i < j and bands[i] == bands[j]:
                    graph.add_edge(i, j)

    chord_keys = {chord.key for chord in rc.chords}
    groups = sorted(
        (sorted(ids) for ids in nx.connected_components(graph)),
        key=lambda ids: (bands[ids[0]], ids[0]),
    )

    by_band: Dict[int, List[Component]] = {}
    for index, ids in enumerate(groups):
        band = bands[ids[0]]
        comp = _build_component(
            index, band, (levels[band], levels[band + 1]), ids, rc, spec, edge_pieces, chord_keys
        )
        comp = replace(comp, kind=classify_component(comp))
        logger.info(
            "decomp.component index=%d band=%d kind=%s euler=%d t=%d identified=%d",
            comp.index, band, comp.kind.value, comp.euler, comp.t, len(comp.identified),
        )
        by_band.setdefault(band, []).append(comp)

    return [
        Subdomain(index=band, value_band=(levels[band], levels[band + 1]), components=tuple(comps))
        for band, comps in sorted(by_band.items())
    ]


def _wedge_copies(
    rc: RefinedComplex, ids: Sequence[int], edge_pieces: Mapping[EdgeKey, List[int]]
) -> Tuple[Dict[Tuple[VertexId, int], VertexId], Dict[VertexId, Tuple[VertexId, ...]]]:
    members = set(ids)
    incident: Dict[VertexId, List[int]] = {}
    for pid in ids:
        for v in rc.pieces[pid].vertices:
            incident.setdefault(v, []).append(pid)

    copy_of: Dict[Tuple[VertexId, int], VertexId] = {}
    identified: Dict[VertexId, Tuple[VertexId, ...]] = {}
    for v, pids in incident.items():
        fans = nx.Graph()
        fans.add_nodes_from(pids)
        for pid in pids:
            for a, b in rc.pieces[pid].directed_edges():
                if v not in (a, b):
                    continue
                for other in edge_pieces[edge_key(a, b)]:
                    if other != pid and other in members:
                        fans.add_edge(pid, other)
        wedges = sorted((sorted(w) for w in nx.connected_components(fans)), key=lambda w: w[0])
        if len(wedges) == 1:
            for pid in pids:
                copy_of[(v, pid)] = v
            continue
        copies = []
        for j, wedge in enumerate(wedges):
            cid = f"{v}#{j}"
            copies.append(cid)
            for pid in wedge:
                copy_of[(v, pid)] = cid
        identified[v] = tuple(copies)
    return copy_of, identified


def _boundary_loops(cycles: Iterable[Tuple[VertexId, ...]]) -> Tuple[List[Tuple[VertexId, ...]], Set[Tuple[VertexId, VertexId]]]:
    directed = set()
    for cyc in cycles:
        n = len(cyc)
        for i in range(n):
            directed.add((cyc[i], cyc[(i + 1) % n]))
    boundary = {(a, b) for a, b in directed if (b, a) not in directed}
    nxt: Dict[VertexId, VertexId] = {}
    for a, b in boundary:
        if a in nxt:
            raise UnclassifiableComponent(f"component boundary is not simple at {a!r}", {"vertex": a})
        nxt[a] = b
    loops: List[Tuple[VertexId, ...]] = []
    remaining = set(nxt)
    while remaining:
        start = min(remaining, key=id_key)
        loop = [start]
        remaining.discard(start)
        cur = nxt[start]
        while cur != start:
            if cur not in remaining:
                raise UnclassifiableComponent(f"component boundary is not simple at {cur!r}", {"vertex": cur})
            loop.append(cur)
            remaining.discard(cur)
            cur = nxt[cur]
        loops.append(tuple(loop))
    return loops, boundary


def _build_component(
    index: int,
    band: int,
    value_band: Tuple[float, float],
    ids: Sequence[int],
    rc: RefinedComplex,
    spec: BoundarySpec,
    edge_pieces: Mapping[EdgeKey, List[int]],
    chord_keys: Set[EdgeKey],
) -> Component:
    copy_of, identified = _wedge_copies(rc, ids, edge_pieces)
    cycles = tuple(tuple(copy_of[(v, pid)] for v in rc.pieces[pid].vertices) for pid in ids)
    origin = {cid: v for (v, _), cid in copy_of.items()}
    values = {cid: rc.values[v] for cid, v in origin.items()}

    conductances: Dict[EdgeKey, float] = {}
    chords: Set[EdgeKey] = set()
    for cyc in cycles:
        for i in range(len(cyc)):
            a, b = cyc[i], cyc[(i + 1) % len(cyc)]
            key = edge_key(a, b)
            oa, ob = origin[a], origin[b]
            if edge_key(oa, ob) in chord_keys:
                chords.add(key)
            else:
                conductances[key] = rc.network.conductance(oa, ob)

    loops, boundary = _boundary_loops(cycles)
    level_edges = {edge_key(a, b): values[a] for a, b in boundary if edge_key(a, b) in chords}
    touches_level = {v for key in level_edges for v in key}

    constant: Dict[VertexId, Optional[float]] = {}
    for loop in loops:
        for v in loop:
            fixed = spec.dirichlet_value(origin[v])
            if fixed is not None:
                constant[v] = fixed
            elif v in touches_level:
                constant[v] = values[v]
            else:
                constant[v] = None
    runs = tuple(constant_runs(loops, constant, tol=rc.tol * rc.k))

    edges = set(conductances) | chords
    return Component(
        index=index,
        band=band,
        value_band=value_band,
        pieces=cycles,
        cells=tuple(sorted({rc.pieces[pid].cell for pid in ids})),
        origin=origin,
        values=values,
        conductances=conductances,
        level_edges=level_edges,
        loops=tuple(loops),
        constant=constant,
        runs=runs,
        euler=len(origin) - len(edges) + len(cycles),
        t=count_arc_endpoints(runs),
        identified=identified,
    )


def classify_component(comp: Component) -> ComponentKind:
    """Quadrilateral when ``chi = 1, t = 4``; annulus when ``chi = 0, t = 0``.

    Components that needed wedge splitting are the sliced / singular variants.
    """
    sliced = bool(comp.identified)
    if comp.euler == 1 and comp.t == 4 and len(comp.loops) == 1:
        return ComponentKind.SLICED_QUADRILATERAL if sliced else ComponentKind.QUADRILATERAL
    if comp.euler == 0 and comp.t == 0 and len(comp.loops) == 2:
        return ComponentKind.SINGULAR_ANNULUS if sliced else ComponentKind.ANNULUS
    logger.warning(
        "decomp.unclassifiable index=%d euler=%d t=%d loops=%d", comp.index, comp.euler, comp.t, len(comp.loops)
    )
    raise UnclassifiableComponent(
        f"component #{comp.index} has euler characteristic {comp.euler} and {comp.t} arc endpoints",
        {"component": comp.index, "euler": comp.euler, "t": comp.t, "loops": len(comp.loops)},
    )


def check_energy_partition(
    subdomains: Sequence[Subdomain], rc: RefinedComplex, *, tol_rel: float = GLUING_TOL
) -> Tuple[float, float]:
    """Component energies must add up to the energy of the whole potential."""
    parts = math.fsum(c.energy() for sd in subdomains for c in sd.components)
    total = rc.energy()
    if abs(parts - total) > tol_rel * max(total, 1e-300):
        raise ConsistencyViolation(
            f"component energies sum to {parts!r}, expected {total!r}",
            {"components": parts, "total": total},
        )
    return parts, total


# ---------------------------------------------------------------------------
# Gluing
# ---------------------------------------------------------------------------

def _copy_flux(comp: Component, copy: VertexId) -> float:
    gx = comp.values[copy]
    return abs(math.fsum(c * (gx - comp.values[y]) for y, c in comp.network.neighbors(copy).items()))


def verify_gluing(
    subdomains: Sequence[Subdomain], rc: RefinedComplex, *, tol_rel: float = GLUING_TOL
) -> List[GluingEdge]:
    """Compare the flux length of every cut level component from both sides.

    Raises
    ------
    GluingMismatch
        If the totals, or the lengths of any arc between singular vertices,
        disagree by more than ``tol_rel``.
    """
    comps = [c for sd in subdomains for c in sd.components]
    cut_levels = sorted({sd.value_band[0] for sd in subdomains})[1:]
    band = rc.tol * rc.k
    edges: List[GluingEdge] = []

    for s in cut_levels:
        curve = trace_level_curve(rc, s)
        sides = {
            "upper": [c for c in comps if abs(c.value_band[0] - s) <= band],
            "lower": [c for c in comps if abs(c.value_band[1] - s) <= band],
        }
        owner: Dict[str, Dict[EdgeKey, int]] = {"upper": {}, "lower": {}}
        for side, side_comps in sides.items():
            for c in side_comps:
                for a, b in c.level_edges:
                    owner[side][edge_key(c.origin[a], c.origin[b])] = c.index

        for lc in curve.components:
            on_curve = set(lc.vertices)
            singular = set(lc.singular)
            per_vertex: Dict[str, Dict[VertexId, float]] = {"upper": {}, "lower": {}}
            totals: Dict[str, Dict[int, float]] = {"upper": {}, "lower": {}}
            wedges: List[WedgeFlux] = []
            for side, side_comps in sides.items():
                for c in side_comps:
                    for copy, o in c.origin.items():
                        if o not in on_curve:
                            continue
                        f = _copy_flux(c, copy)
                        totals[side][c.index] = totals[side].get(c.index, 0.0) + f
                        if o in singular:
                            wedges.append(WedgeFlux(vertex=o, copy=copy, component=c.index, side=side, flux=f))
                        else:
                            per_vertex[side][o] = per_vertex[side].get(o, 0.0) + f
            totals = {side: {i: v for i, v in t.items() if v > 0 or i in owner[side].values()} for side, t in totals.items()}

            arcs = []
            for chain in lc.chains:
                first = edge_key(chain[0], chain[1])
                members = [v for v in dict.fromkeys(chain) if v not in singular]
                arcs.append(
                    GluingArc(
                        vertices=chain,
                        upper_component=owner["upper"].get(first),
                        lower_component=owner["lower"].get(first),
                        length_upper=math.fsum(per_vertex["upper"].get(v, 0.0) for v in members),
                        length_lower=math.fsum(per_vertex["lower"].get(v, 0.0) for v in members),
                    )
                )

            edge = GluingEdge(
                level=s,
                vertices=lc.vertices,
                upper=totals["upper"],
                lower=totals["lower"],
                length_upper=math.fsum(totals["upper"].values()),
                length_lower=math.fsum(totals["lower"].values()),
                arcs=tuple(arcs),
                wedges=tuple(wedges),
                closed=lc.closed,
            )
            logger.info(
                "decomp.gluing level=%.9g vertices=%d upper=%.12g lower=%.12g arcs=%d",
                s, len(lc.vertices), edge.length_upper, edge.length_lower, len(arcs),
            )
            if not edge.matched(tol_rel):
                logger.warning("decomp.gluing_mismatch level=%.9g", s)
                raise GluingMismatch(
                    f"level curve at {s!r} measures {edge.length_upper!r} from above "
                    f"and {edge.length_lower!r} from below",
                    {"level": s, "upper": edge.length_upper, "lower": edge.length_lower},
                )
            edges.append(edge)
    return edges
