"""Level-vertex insertion and the refined complex built on a solved potential.

A :class:`RefinedComplex` never changes the base complex.  It records extra
vertices placed on base edges (type I where a level set crosses an edge,
type II for padding) together with the cut levels, and derives from them:

* the refined network, where a base edge of conductance ``c`` split at
  parameters ``0 < t_1 < ... < 1`` carries ``c / (t_{i+1} - t_i)`` on each
  segment, so every segment carries the original edge current;
* the chords, the pieces of a level set inside one cell;
* the pieces, the cells cut along every chord.

``g`` is linear along every base edge, which keeps the potential harmonic at
each added vertex and leaves the Dirichlet energy unchanged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from domain.bvp import Potential, dirichlet_energy, laplacian_at
from domain.complex import (
    CellComplex,
    EdgeKey,
    Network,
    Point,
    VertexId,
    cell_triangles,
    edge_key,
    id_key,
    quad_diagonal,
    signed_area,
)
from domain.errors import DegenerateLevel, MissingValue, OutsideComplex, ValidationError

logger = logging.getLogger(__name__)

LEVEL_TOL = 1e-9


class VertexKind(str, Enum):
    TYPE_I = "type_i"
    TYPE_II = "type_ii"


@dataclass(frozen=True)
class AddedVertex:
    id: str
    host: EdgeKey
    t: float
    kind: VertexKind
    value: float
    level: Optional[int] = None


@dataclass(frozen=True)
class Chord:
    """Segment of the level set ``levels[level]`` inside base cell ``cell``."""

    level: int
    cell: int
    a: VertexId
    b: VertexId
    bend: Optional[Point] = None

    @property
    def key(self) -> EdgeKey:
        return edge_key(self.a, self.b)


@dataclass(frozen=True)
class Piece:
    cell: int
    vertices: Tuple[VertexId, ...]

    def directed_edges(self) -> Iterator[Tuple[VertexId, VertexId]]:
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]


@dataclass(frozen=True)
class _Bend:
    point: Point


_End = Union[VertexId, _Bend]


@dataclass(frozen=True, eq=False)
class RefinedComplex:
    base: CellComplex
    base_values: Mapping[VertexId, float]
    k: float
    added: Tuple[AddedVertex, ...] = ()
    levels: Tuple[float, ...] = ()
    tol: float = LEVEL_TOL

    @classmethod
    def from_potential(
        cls, cx: CellComplex, g: Union[Potential, Mapping[VertexId, float]], *, tol: float = LEVEL_TOL
    ) -> "RefinedComplex":
        values = g.values if isinstance(g, Potential) else g
        missing = [v for v in cx.vertex_ids if v not in values]
        if missing:
            raise MissingValue(f"no value given for vertex {missing[0]!r}", {"vertex": missing[0]})
        if isinstance(g, Potential):
            k = g.k
        else:
            k = max((abs(values[v]) for v in cx.vertex_ids), default=1.0) or 1.0
        return cls(base=cx, base_values={v: float(values[v]) for v in cx.vertex_ids}, k=float(k), tol=tol)

    # -- Vertices ---------------------------------------------------------------

    @cached_property
    def added_by_id(self) -> Dict[VertexId, AddedVertex]:
        return {av.id: av for av in self.added}

    @property
    def vertex_ids(self) -> Tuple[VertexId, ...]:
        return self.base.vertex_ids + tuple(av.id for av in self.added)

    def has_vertex(self, v: VertexId) -> bool:
        return self.base.has_vertex(v) or v in self.added_by_id

    @property
    def type_i_count(self) -> int:
        return sum(1 for av in self.added if av.kind is VertexKind.TYPE_I)

    @property
    def type_ii_count(self) -> int:
        return sum(1 for av in self.added if av.kind is VertexKind.TYPE_II)

    @cached_property
    def values(self) -> Dict[VertexId, float]:
        values = dict(self.base_values)
        values.update((av.id, av.value) for av in self.added)
        return values

    @cached_property
    def coords(self) -> Dict[VertexId, Point]:
        coords = dict(self.base.coords)
        for av in self.added:
            (x0, y0), (x1, y1) = self.base.coords[av.host[0]], self.base.coords[av.host[1]]
            coords[av.id] = (x0 + av.t * (x1 - x0), y0 + av.t * (y1 - y0))
        return coords

    def parameter(self, v: VertexId, host: EdgeKey) -> float:
        """Position of *v* along base edge *host*, from ``host[0]`` (0) to ``host[1]`` (1)."""
        if v == host[0]:
            return 0.0
        if v == host[1]:
            return 1.0
        av = self.added_by_id.get(v)
        if av is None or av.host != host:
            raise ValidationError(f"vertex {v!r} does not lie on edge {host!r}")
        return av.t

    # -- Edges ----------------------------------------------------------------

    @cached_property
    def splits(self) -> Dict[EdgeKey, Tuple[VertexId, ...]]:
        """Base edge -> the vertex chain from ``key[0]`` to ``key[1]`` (split edges only)."""
        chains: Dict[EdgeKey, List[AddedVertex]] = {}
        for av in self.added:
            chains.setdefault(av.host, []).append(av)
        return {
            key: (key[0],) + tuple(av.id for av in sorted(items, key=lambda a: a.t)) + (key[1],)
            for key, items in chains.items()
        }

    def segment_chain(self, a: VertexId, b: VertexId) -> Tuple[VertexId, ...]:
        key = edge_key(a, b)
        chain = self.splits.get(key, key)
        return tuple(chain) if chain[0] == a else tuple(reversed(chain))

    def host_of(self, u: VertexId, v: VertexId) -> EdgeKey:
        """The base edge containing refined segment ``(u, v)``."""
        for end in (u, v):
            if end in self.added_by_id:
                key = self.added_by_id[end].host
                break
        else:
            key = edge_key(u, v)
            if key not in self.base.conductances:
                raise ValidationError(f"({u!r}, {v!r}) is not an edge of the complex")
        chain = self.splits.get(key, key)
        for a, b in zip(chain, chain[1:]):
            if {a, b} == {u, v}:
                return key
        raise ValidationError(f"({u!r}, {v!r}) is not a segment of the refined complex")

    @cached_property
    def network(self) -> Network:
        adjacency: Dict[VertexId, Dict[VertexId, float]] = {v: {} for v in self.vertex_ids}
        for key, c in self.base.conductances.items():
            chain = self.splits.get(key, key)
            for a, b in zip(chain, chain[1:]):
                seg = c / (self.parameter(b, key) - self.parameter(a, key))
                adjacency[a][b] = seg
                adjacency[b][a] = seg
        boundary = set(self.base.boundary_vertices)
        boundary.update(av.id for av in self.added if av.host in self.base.boundary_edges)
        return Network(adjacency=adjacency, boundary=frozenset(boundary))

    @cached_property
    def modified_conductances(self) -> Dict[EdgeKey, float]:
        """Conductances of the segments of every split edge."""
        out: Dict[EdgeKey, float] = {}
        for chain in self.splits.values():
            for a, b in zip(chain, chain[1:]):
                out[edge_key(a, b)] = self.network.conductance(a, b)
        return out

    def energy(self) -> float:
        return dirichlet_energy(self.network, self.values)

    def is_harmonic_at(self, v: VertexId, *, tol: float = 1e-9) -> bool:
        scale = max(1.0, max(self.network.neighbors(v).values(), default=1.0)) * self.k
        return abs(laplacian_at(self, self.values, v)) <= tol * scale

    # -- Levels -----------------------------------------------------------------

    def level_index(self, s: float) -> Optional[int]:
        for i, level in enumerate(self.levels):
            if abs(level - s) <= self.tol * self.k:
                return i
        return None

    def on_level(self, v: VertexId, s: float) -> bool:
        return abs(self.values[v] - s) <= self.tol * self.k

    @cached_property
    def crossings(self) -> Dict[Tuple[EdgeKey, int], VertexId]:
        return {(av.host, av.level): av.id for av in self.added if av.kind is VertexKind.TYPE_I}

    @cached_property
    def chords(self) -> Tuple[Chord, ...]:
        found: List[Chord] = []
        for li, s in enumerate(self.levels):
            for ci in range(len(self.base.cells)):
                found.extend(_cell_chords(self, ci, li, s))
        return tuple(found)

    @cached_property
    def chord_bends(self) -> Dict[Tuple[VertexId, VertexId], Point]:
        bends: Dict[Tuple[VertexId, VertexId], Point] = {}
        for chord in self.chords:
            if chord.bend is not None:
                bends[(chord.a, chord.b)] = chord.bend
                bends[(chord.b, chord.a)] = chord.bend
        return bends

    def cell_polygon(self, ci: int) -> Tuple[VertexId, ...]:
        """Counterclockwise boundary of base cell *ci* including added vertices."""
        cell = self.base.cells[ci]
        ring: List[VertexId] = []
        for i in range(len(cell)):
            ring.extend(self.segment_chain(cell[i], cell[(i + 1) % len(cell)])[:-1])
        return tuple(ring)

    @cached_property
    def pieces(self) -> Tuple[Piece, ...]:
        by_cell: Dict[int, List[Chord]] = {}
        for chord in self.chords:
            by_cell.setdefault(chord.cell, []).append(chord)
        out: List[Piece] = []
        for ci in range(len(self.base.cells)):
            polygons = [self.cell_polygon(ci)]
            for chord in by_cell.get(ci, ()):
                polygons = _split_polygon(polygons, chord)
            out.extend(Piece(cell=ci, vertices=poly) for poly in polygons)
        return tuple(out)


# -- Chords ----------------------------------------------------------------------

def _side(rc: RefinedComplex, v: VertexId, s: float) -> int:
    d = rc.values[v] - s
    if abs(d) <= rc.tol * rc.k:
        return 0
    return 1 if d > 0 else -1


def _crossing(rc: RefinedComplex, a: VertexId, b: VertexId, li: int, s: float, diagonal: bool) -> _End:
    ga, gb = rc.values[a], rc.values[b]
    t = (ga - s) / (ga - gb)
    if diagonal:
        (x0, y0), (x1, y1) = rc.base.coords[a], rc.base.coords[b]
        return _Bend((x0 + t * (x1 - x0), y0 + t * (y1 - y0)))
    vid = rc.crossings.get((edge_key(a, b), li))
    if vid is None:
        raise DegenerateLevel(
            f"edge ({a!r}, {b!r}) crosses level {s!r} without a level vertex",
            {"edge": [a, b], "level": s},
        )
    return vid


def _cell_chords(rc: RefinedComplex, ci: int, li: int, s: float) -> List[Chord]:
    """Chords of level ``s`` in base cell *ci*, with quads evaluated per triangle."""
    cell = rc.base.cells[ci]
    diagonal: Optional[EdgeKey] = None
    if len(cell) == 4:
        i, j = quad_diagonal(cell)
        diagonal = edge_key(cell[i], cell[j])

    halves: List[Tuple[_End, _End]] = []
    flat_diagonal: List[int] = []
    for tri in cell_triangles(cell):
        sides = [_side(rc, v, s) for v in tri]
        zeros = [v for v, side in zip(tri, sides) if side == 0]
        if len(zeros) == 3:
            raise DegenerateLevel(f"cell #{ci} is flat at level {s!r}", {"cell": ci, "level": s})
        if len(zeros) == 2:
            if edge_key(*zeros) != diagonal:
                raise DegenerateLevel(
                    f"edge ({zeros[0]!r}, {zeros[1]!r}) lies on level {s!r}",
                    {"edge": zeros, "level": s},
                )
            flat_diagonal.append(next(side for side in sides if side != 0))
            continue
        ends: List[_End] = []
        for m in range(3):
            a, b = tri[m], tri[(m + 1) % 3]
            if sides[m] * sides[(m + 1) % 3] < 0:
                ends.append(_crossing(rc, a, b, li, s, edge_key(a, b) == diagonal))
        if zeros and len(ends) == 1:
            halves.append((zeros[0], ends[0]))
        elif not zeros and len(ends) == 2:
            halves.append((ends[0], ends[1]))

    chords: List[Chord] = []
    if len(flat_diagonal) == 2 and flat_diagonal[0] != flat_diagonal[1]:
        chords.append(Chord(level=li, cell=ci, a=diagonal[0], b=diagonal[1]))

    bent = [h for h in halves if isinstance(h[0], _Bend) or isinstance(h[1], _Bend)]
    for a, b in halves:
        if not (isinstance(a, _Bend) or isinstance(b, _Bend)):
            chords.append(Chord(level=li, cell=ci, a=a, b=b))
    if bent:
        if len(bent) != 2:
            raise DegenerateLevel(f"level {s!r} crosses the diagonal of cell #{ci} only once", {"cell": ci})
        (a0, a1), (b0, b1) = bent
        start, bend = (a1, a0) if isinstance(a0, _Bend) else (a0, a1)
        end = b1 if isinstance(b0, _Bend) else b0
        chords.append(Chord(level=li, cell=ci, a=start, b=end, bend=bend.point))
    return chords


def _split_polygon(polygons: List[Tuple[VertexId, ...]], chord: Chord) -> List[Tuple[VertexId, ...]]:
    for idx, poly in enumerate(polygons):
        if chord.a not in poly or chord.b not in poly:
            continue
        i, j = sorted((poly.index(chord.a), poly.index(chord.b)))
        if j - i in (1, len(poly) - 1):
            continue
        first = poly[i : j + 1]
        second = poly[j:] + poly[: i + 1]
        return polygons[:idx] + [first, second] + polygons[idx + 1 :]
    raise DegenerateLevel(
        f"chord ({chord.a!r}, {chord.b!r}) does not split cell #{chord.cell}",
        {"cell": chord.cell, "chord": [chord.a, chord.b]},
    )


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def affine_value_at(
    cx: Union[CellComplex, RefinedComplex],
    g: Union[Potential, Mapping[VertexId, float], None],
    point: Point,
    *,
    tol: float = 1e-12,
) -> float:
    """Piecewise-affine extension of ``g`` at *point*.

    Quadrilaterals are evaluated on the two triangles of their diagonal.

    Raises
    ------
    OutsideComplex
        If no cell contains *point*.
    """
    base = cx.base if isinstance(cx, RefinedComplex) else cx
    if g is None and isinstance(cx, RefinedComplex):
        values: Mapping[VertexId, float] = cx.base_values
    else:
        values = g.values if isinstance(g, Potential) else g
    for _, tri in base.triangles():
        corners = [base.coords[v] for v in tri]
        area = signed_area(corners)
        weights = [
            signed_area([point, corners[1], corners[2]]) / area,
            signed_area([corners[0], point, corners[2]]) / area,
            signed_area([corners[0], corners[1], point]) / area,
        ]
        if all(w >= -tol for w in weights):
            try:
                return sum(w * values[v] for w, v in zip(weights, tri))
            except KeyError as exc:
                raise MissingValue(f"no value given for vertex {exc.args[0]!r}") from None
    raise OutsideComplex(f"point {point!r} lies outside every cell", {"point": list(point)})


def insert_level_vertices(rc: RefinedComplex, s: float) -> RefinedComplex:
    """Add a type I vertex wherever level ``s`` crosses a base edge transversally.

    Levels at ``0`` or ``k`` leave *rc* unchanged, as does a level already cut.

    Raises
    ------
    DegenerateLevel
        If two adjacent vertices both sit on level ``s``.
    """
    band = rc.tol * rc.k
    if s <= band or s >= rc.k - band:
        logger.debug("refine.skip_level s=%r reason=boundary_value", s)
        return rc
    if rc.level_index(s) is not None:
        return rc

    values = rc.values
    on_level = {v for v in rc.vertex_ids if abs(values[v] - s) <= band}
    ties = sorted(
        {edge_key(v, w) for v in on_level for w in rc.network.neighbors(v) if w in on_level},
        key=lambda e: (id_key(e[0]), id_key(e[1])),
    )
    if ties:
        logger.warning("refine.degenerate s=%r ties=%d", s, len(ties))
        raise DegenerateLevel(
            f"level {s!r} runs along {len(ties)} edge(s) with equal end values",
            {"level": s, "edges": [list(e) for e in ties[:10]]},
        )

    li = len(rc.levels)
    new: List[AddedVertex] = []
    for a, b in rc.base.conductances:
        ga, gb = rc.base_values[a], rc.base_values[b]
        if abs(ga - s) <= band or abs(gb - s) <= band or (ga - s) * (gb - s) > 0:
            continue
        chain = rc.splits.get((a, b), ())
        if any(x in on_level for x in chain[1:-1]):
            continue
        t = (ga - s) / (ga - gb)
        new.append(AddedVertex(id=f"L{li}:{a}-{b}", host=(a, b), t=t, kind=VertexKind.TYPE_I, value=float(s), level=li))

    logger.info("refine.level s=%.9g type_i=%d", s, len(new))
    return replace(rc, added=rc.added + tuple(new), levels=rc.levels + (float(s),))


def subdivide_edge(rc: RefinedComplex, u: VertexId, v: VertexId, t: float = 0.5) -> RefinedComplex:
    """Insert a type II vertex at parameter *t* of segment ``u -> v``."""
    if not 0.0 < t < 1.0:
        raise ValidationError(f"subdivision parameter must lie in (0, 1), got {t!r}")
    key = rc.host_of(u, v)
    tu, tv = rc.parameter(u, key), rc.parameter(v, key)
    tb = tu + t * (tv - tu)
    ga, gb = rc.base_values[key[0]], rc.base_values[key[1]]
    vertex = AddedVertex(
        id=f"P{rc.type_ii_count}:{key[0]}-{key[1]}",
        host=key,
        t=tb,
        kind=VertexKind.TYPE_II,
        value=ga + tb * (gb - ga),
    )
    return replace(rc, added=rc.added + (vertex,))


def pad_combinatorial_distance(rc: RefinedComplex, levels: Sequence[float]) -> RefinedComplex:
    """Separate consecutive level vertex sets by at least two edges.

    Every level is inserted first; then each segment joining two consecutive
    levels gets a type II vertex at its midpoint.
    """
    ordered = sorted(levels, reverse=True)
    for s in ordered:
        rc = insert_level_vertices(rc, s)
    before = rc.type_ii_count
    for hi, lo in zip(ordered, ordered[1:]):
        upper = [v for v in rc.vertex_ids if rc.on_level(v, hi)]
        lower = {v for v in rc.vertex_ids if rc.on_level(v, lo)}
        pairs = sorted(
            {edge_key(a, b) for a in upper for b in rc.network.neighbors(a) if b in lower},
            key=lambda e: (id_key(e[0]), id_key(e[1])),
        )
        for a, b in pairs:
            rc = subdivide_edge(rc, a, b, 0.5)
    logger.info("refine.padded levels=%d type_ii=%d", len(ordered), rc.type_ii_count - before)
    return rc
