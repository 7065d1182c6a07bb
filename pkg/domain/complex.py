"""Weighted planar cell complex and its boundary data.

A :class:`CellComplex` is an immutable planar network: vertices with
coordinates, edges with positive conductances, counterclockwise triangle or
quadrilateral cells, and the boundary loops (outer loop first, each oriented
with the region on its left).  A :class:`BoundarySpec` assigns every boundary
vertex one role: Dirichlet at the top value ``k`` (alpha arcs), Dirichlet at
zero (the ground set) or Neumann.

Public API:

* ``CellComplex.build(...)``      -- validated construction
* ``CellComplex.vertex_star(v)``  -- counterclockwise neighbour order
* ``CellComplex.euler_characteristic()``
* ``BoundarySpec.build(...)``     -- validated role assignment
* ``constant_runs(...)``          -- maximal constant-value boundary runs
* ``boundary_runs(cx, spec)``     -- the same for the Dirichlet data; endpoints are corners
* ``Network``                     -- the bare weighted graph shared by solvers
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from domain.errors import UnknownVertex, ValidationError

logger = logging.getLogger(__name__)

VertexId = Union[int, str]
EdgeKey = Tuple[VertexId, VertexId]
Point = Tuple[float, float]

_TWO_PI = 2.0 * math.pi


def id_key(v: VertexId) -> Tuple[int, int, str]:
    """Total order on vertex ids: integers first, then strings."""
    if isinstance(v, int) and not isinstance(v, bool):
        return (0, v, "")
    return (1, 0, str(v))


def edge_key(u: VertexId, v: VertexId) -> EdgeKey:
    return (u, v) if id_key(u) <= id_key(v) else (v, u)


def signed_area(points: Sequence[Point]) -> float:
    """Shoelace area, positive for counterclockwise polygons."""
    total = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return 0.5 * total


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _angle(origin: Point, target: Point) -> float:
    theta = math.atan2(target[1] - origin[1], target[0] - origin[0])
    return theta + _TWO_PI if theta < 0 else theta


def quad_diagonal(cell: Sequence[VertexId]) -> Tuple[int, int]:
    """Positions of the diagonal used to triangulate a quadrilateral.

    The diagonal starts at the vertex with the lowest id.
    """
    start = min(range(4), key=lambda i: id_key(cell[i]))
    return start, (start + 2) % 4


def cell_triangles(cell: Sequence[VertexId]) -> Tuple[Tuple[VertexId, VertexId, VertexId], ...]:
    """Counterclockwise triangles covering *cell* (quads split on their diagonal)."""
    if len(cell) == 3:
        return ((cell[0], cell[1], cell[2]),)
    i, j = quad_diagonal(cell)
    return (
        (cell[i], cell[(i + 1) % 4], cell[j]),
        (cell[i], cell[j], cell[(j + 1) % 4]),
    )


# ---------------------------------------------------------------------------
# Weighted graph
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Network:
    """Symmetric conductance graph with a marked boundary vertex set."""

    adjacency: Mapping[VertexId, Mapping[VertexId, float]]
    boundary: FrozenSet[VertexId] = frozenset()

    @property
    def vertex_ids(self) -> Tuple[VertexId, ...]:
        return tuple(self.adjacency)

    def has_vertex(self, v: VertexId) -> bool:
        return v in self.adjacency

    def neighbors(self, v: VertexId) -> Mapping[VertexId, float]:
        try:
            return self.adjacency[v]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v!r}", {"vertex": v}) from None

    def conductance(self, u: VertexId, v: VertexId) -> float:
        return self.neighbors(u)[v]

    def is_boundary(self, v: VertexId) -> bool:
        return v in self.boundary

    def edges(self) -> Iterator[Tuple[VertexId, VertexId, float]]:
        """Each undirected edge once, as ``(u, v, c)`` with ``u`` before ``v``."""
        for u, nbrs in self.adjacency.items():
            for v, c in nbrs.items():
                if id_key(u) < id_key(v):
                    yield u, v, c

    def to_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.adjacency)
        graph.add_weighted_edges_from(self.edges(), weight="c")
        return graph


# ---------------------------------------------------------------------------
# Cell complex
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CellComplex:
    coords: Mapping[VertexId, Point]
    conductances: Mapping[EdgeKey, float]
    cells: Tuple[Tuple[VertexId, ...], ...]
    loops: Tuple[Tuple[VertexId, ...], ...]

    # -- Construction -------------------------------------------------------

    @classmethod
    def build(
        cls,
        vertices: Iterable[Tuple[VertexId, float, float]],
        edges: Iterable[Tuple[VertexId, VertexId, float]],
        cells: Iterable[Sequence[VertexId]],
        loops: Iterable[Sequence[VertexId]],
    ) -> "CellComplex":
        """Validate raw tables and return a complex with normalized loops.

        Raises
        ------
        ValidationError
            Naming the first violated invariant (non-manifold edge,
            inconsistent orientation, dangling vertex, ...).
        """
        coords: Dict[VertexId, Point] = {}
        for vid, x, y in vertices:
            if vid in coords:
                raise ValidationError(f"duplicate vertex id {vid!r}", {"vertex": vid})
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValidationError(f"vertex {vid!r} has non-finite coordinates", {"vertex": vid})
            coords[vid] = (float(x), float(y))

        conductances: Dict[EdgeKey, float] = {}
        for u, v, c in edges:
            for end in (u, v):
                if end not in coords:
                    raise ValidationError(f"edge ({u!r}, {v!r}) references unknown vertex {end!r}", {"vertex": end})
            if u == v:
                raise ValidationError(f"self-loop at vertex {u!r}", {"vertex": u})
            key = edge_key(u, v)
            if key in conductances:
                raise ValidationError(f"duplicate edge ({u!r}, {v!r}); the graph must be simple", {"edge": list(key)})
            if not (math.isfinite(c) and c > 0):
                raise ValidationError(f"edge ({u!r}, {v!r}) has non-positive conductance {c!r}", {"edge": list(key)})
            conductances[key] = float(c)

        touched = {end for key in conductances for end in key}
        for vid in coords:
            if vid not in touched:
                raise ValidationError(f"dangling vertex {vid!r}", {"vertex": vid})

        cell_list = tuple(tuple(cell) for cell in cells)
        loop_list = tuple(tuple(loop) for loop in loops)
        cx = cls(coords=coords, conductances=conductances, cells=cell_list, loops=loop_list)
        _validate_cells(cx)
        cx = _with_oriented_loops(cx)
        _validate_embedding(cx)
        return cx

    # -- Basic queries --------------------------------------------------------

    @property
    def vertex_ids(self) -> Tuple[VertexId, ...]:
        return tuple(self.coords)

    def has_vertex(self, v: VertexId) -> bool:
        return v in self.coords

    def _require(self, v: VertexId) -> None:
        if v not in self.coords:
            raise UnknownVertex(f"unknown vertex {v!r}", {"vertex": v})

    @cached_property
    def network(self) -> Network:
        adjacency: Dict[VertexId, Dict[VertexId, float]] = {v: {} for v in self.coords}
        for (u, v), c in self.conductances.items():
            adjacency[u][v] = c
            adjacency[v][u] = c
        return Network(adjacency=adjacency, boundary=self.boundary_vertices)

    def neighbors(self, v: VertexId) -> Mapping[VertexId, float]:
        return self.network.neighbors(v)

    def conductance(self, u: VertexId, v: VertexId) -> float:
        return self.conductances[edge_key(u, v)]

    @cached_property
    def edge_cells(self) -> Dict[EdgeKey, Tuple[int, ...]]:
        incidence: Dict[EdgeKey, List[int]] = {key: [] for key in self.conductances}
        for idx, cell in enumerate(self.cells):
            n = len(cell)
            for i in range(n):
                incidence[edge_key(cell[i], cell[(i + 1) % n])].append(idx)
        return {key: tuple(ids) for key, ids in incidence.items()}

    @cached_property
    def boundary_edges(self) -> FrozenSet[EdgeKey]:
        return frozenset(key for key, ids in self.edge_cells.items() if len(ids) == 1)

    @cached_property
    def boundary_vertices(self) -> FrozenSet[VertexId]:
        return frozenset(v for loop in self.loops for v in loop)

    @cached_property
    def loop_of(self) -> Dict[VertexId, int]:
        return {v: i for i, loop in enumerate(self.loops) for v in loop}

    def is_boundary(self, v: VertexId) -> bool:
        self._require(v)
        return v in self.boundary_vertices

    def euler_characteristic(self) -> int:
        """V - E + F over the 2-cells (no outer face)."""
        return len(self.coords) - len(self.conductances) + len(self.cells)

    # -- Rotation system ------------------------------------------------------

    @cached_property
    def _stars(self) -> Dict[VertexId, Tuple[VertexId, ...]]:
        return {v: _chain_star(self, v) for v in self.coords}

    def vertex_star(self, v: VertexId) -> Tuple[VertexId, ...]:
        """Neighbours of *v* in counterclockwise order.

        Interior vertices give a full cycle starting at the smallest angle in
        ``[0, 2*pi)``.  Boundary vertices give the open fan into the region.
        """
        self._require(v)
        return self._stars[v]

    def cells_at(self, v: VertexId) -> Tuple[int, ...]:
        self._require(v)
        return tuple(i for i, cell in enumerate(self.cells) if v in cell)

    def triangles(self) -> Iterator[Tuple[int, Tuple[VertexId, VertexId, VertexId]]]:
        for idx, cell in enumerate(self.cells):
            for tri in cell_triangles(cell):
                yield idx, tri


# -- Validation helpers ---------------------------------------------------------

def _validate_cells(cx: CellComplex) -> None:
    directed: Dict[Tuple[VertexId, VertexId], int] = {}
    clash: Optional[Tuple[VertexId, VertexId, int, int]] = None
    for idx, cell in enumerate(cx.cells):
        if len(cell) not in (3, 4):
            raise ValidationError(f"cell #{idx} has {len(cell)} vertices; expected 3 or 4", {"cell": idx})
        if len(set(cell)) != len(cell):
            raise ValidationError(f"cell #{idx} repeats a vertex", {"cell": idx})
        for v in cell:
            if v not in cx.coords:
                raise ValidationError(f"cell #{idx} references unknown vertex {v!r}", {"cell": idx})
        n = len(cell)
        points = [cx.coords[v] for v in cell]
        if signed_area(points) <= 0:
            raise ValidationError(f"cell #{idx} is not counterclockwise", {"cell": idx})
        if n == 4:
            for i in range(4):
                if _cross(points[i], points[(i + 1) % 4], points[(i + 2) % 4]) <= 0:
                    raise ValidationError(f"quadrilateral cell #{idx} is not strictly convex", {"cell": idx})
        for i in range(n):
            a, b = cell[i], cell[(i + 1) % n]
            if edge_key(a, b) not in cx.conductances:
                raise ValidationError(f"cell #{idx} side ({a!r}, {b!r}) is not an edge", {"cell": idx})
            if (a, b) in directed and clash is None:
                clash = (a, b, directed[(a, b)], idx)
            directed.setdefault((a, b), idx)

    for key, ids in cx.edge_cells.items():
        if len(ids) > 2:
            raise ValidationError(f"non-manifold edge {key!r} lies in {len(ids)} cells", {"edge": list(key)})
        if not ids:
            raise ValidationError(f"edge {key!r} lies in no cell", {"edge": list(key)})
    if clash is not None:
        a, b, first, second = clash
        raise ValidationError(
            f"inconsistent orientation: side ({a!r}, {b!r}) used by cells #{first} and #{second}",
            {"cell": second},
        )

    if not nx.is_connected(cx.network.to_graph()):
        raise ValidationError("graph is not connected")


def _with_oriented_loops(cx: CellComplex) -> CellComplex:
    """Check the declared loops against the boundary edges and orient them."""
    if not cx.loops:
        raise ValidationError("at least one boundary loop is required")

    region_left = set()
    for cell in cx.cells:
        n = len(cell)
        for i in range(n):
            a, b = cell[i], cell[(i + 1) % n]
            if edge_key(a, b) in cx.boundary_edges:
                region_left.add((a, b))

    seen_vertices: Dict[VertexId, int] = {}
    covered = set()
    oriented: List[Tuple[VertexId, ...]] = []
    for li, loop in enumerate(cx.loops):
        if len(loop) < 3:
            raise ValidationError(f"boundary loop #{li} has fewer than 3 vertices", {"loop": li})
        for v in loop:
            if v not in cx.coords:
                raise ValidationError(f"boundary loop #{li} references unknown vertex {v!r}", {"loop": li})
            if v in seen_vertices:
                raise ValidationError(f"boundary vertex {v!r} appears twice in the declared loops", {"vertex": v})
            seen_vertices[v] = li
        pairs = [(loop[i], loop[(i + 1) % len(loop)]) for i in range(len(loop))]
        for a, b in pairs:
            if edge_key(a, b) not in cx.boundary_edges:
                raise ValidationError(f"boundary loop #{li} uses non-boundary edge ({a!r}, {b!r})", {"loop": li})
            covered.add(edge_key(a, b))
        if all(p in region_left for p in pairs):
            oriented.append(tuple(loop))
        elif all((b, a) in region_left for a, b in pairs):
            oriented.append((loop[0],) + tuple(reversed(loop[1:])))
        else:
            raise ValidationError(f"boundary loop #{li} mixes orientations", {"loop": li})

    missing = cx.boundary_edges - covered
    if missing:
        key = sorted(missing, key=lambda k: (id_key(k[0]), id_key(k[1])))[0]
        raise ValidationError(f"boundary edge {key!r} is not on any declared loop", {"edge": list(key)})

    return CellComplex(coords=cx.coords, conductances=cx.conductances, cells=cx.cells, loops=tuple(oriented))


def _validate_embedding(cx: CellComplex) -> None:
    areas = [signed_area([cx.coords[v] for v in loop]) for loop in cx.loops]
    if areas[0] <= 0:
        raise ValidationError("the first boundary loop must be the outer loop")
    for li, area in enumerate(areas[1:], start=1):
        if area >= 0:
            raise ValidationError(f"boundary loop #{li} is not an inner loop", {"loop": li})

    enclosed = sum(areas)
    cell_area = sum(signed_area([cx.coords[v] for v in cell]) for cell in cx.cells)
    if abs(cell_area - enclosed) > 1e-9 * max(1.0, abs(enclosed)):
        raise ValidationError(
            f"cells overlap or leave holes: cell area {cell_area!r} vs enclosed area {enclosed!r}"
        )

    for v in cx.coords:
        star = cx.vertex_star(v)
        origin = cx.coords[v]
        angles = [_angle(origin, cx.coords[w]) for w in star]
        steps = [(angles[i + 1] - angles[i]) % _TWO_PI for i in range(len(angles) - 1)]
        interior = v not in cx.boundary_vertices
        if interior:
            steps.append((angles[0] - angles[-1]) % _TWO_PI)
        if any(step <= 0 for step in steps):
            raise ValidationError(f"neighbours of {v!r} are not in counterclockwise order", {"vertex": v})
        turn = sum(steps)
        if interior and abs(turn - _TWO_PI) > 1e-9:
            raise ValidationError(f"rotation at interior vertex {v!r} winds {turn / _TWO_PI:.3f} times", {"vertex": v})
        if not interior and turn >= _TWO_PI:
            raise ValidationError(f"boundary fan at {v!r} overlaps itself", {"vertex": v})


def _chain_star(cx: CellComplex, v: VertexId) -> Tuple[VertexId, ...]:
    """Chain the cell corners at *v* into the counterclockwise neighbour order."""
    link: Dict[VertexId, VertexId] = {}
    for cell in cx.cells:
        if v not in cell:
            continue
        i = cell.index(v)
        nxt, prv = cell[(i + 1) % len(cell)], cell[i - 1]
        if nxt in link:
            raise ValidationError(f"non-manifold vertex {v!r}", {"vertex": v})
        link[nxt] = prv

    neighbours = set(cx.network.neighbors(v))
    if v in cx.boundary_vertices:
        starts = [w for w in link if w not in link.values()]
        if len(starts) != 1:
            raise ValidationError(f"non-manifold vertex {v!r}: the cells around it form {len(starts)} fans", {"vertex": v})
        order = [starts[0]]
        while order[-1] in link:
            order.append(link[order[-1]])
    else:
        origin = cx.coords[v]
        first = min(link, key=lambda w: _angle(origin, cx.coords[w]))
        order = [first]
        nxt = link.get(first)
        while nxt is not None and nxt != first and len(order) <= len(link):
            order.append(nxt)
            nxt = link.get(nxt)
        if nxt != first:
            raise ValidationError(f"non-manifold vertex {v!r}: its cells do not form a cycle", {"vertex": v})

    if len(order) != len(neighbours) or set(order) != neighbours:
        raise ValidationError(f"non-manifold vertex {v!r}: cells do not close up around it", {"vertex": v})
    return tuple(order)


# ---------------------------------------------------------------------------
# Boundary roles
# ---------------------------------------------------------------------------

class Role(str, Enum):
    ALPHA = "alpha"
    GROUND = "ground"
    NEUMANN = "neumann"


@dataclass(frozen=True, eq=False)
class BoundarySpec:
    k: float
    alpha_arcs: Tuple[Tuple[VertexId, ...], ...]
    beta_arcs: Tuple[Tuple[VertexId, ...], ...]
    ground_arcs: Tuple[Tuple[VertexId, ...], ...] = ()
    roles: Mapping[VertexId, Role] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        cx: CellComplex,
        k: float,
        alpha_arcs: Iterable[Sequence[VertexId]],
        beta_arcs: Iterable[Sequence[VertexId]] = (),
        ground_arcs: Iterable[Sequence[VertexId]] = (),
    ) -> "BoundarySpec":
        """Check the arcs against *cx* and derive every boundary role.

        Outer loop: alpha -> Dirichlet ``k``, explicit ground arc -> Dirichlet 0,
        anything else -> Neumann.  Inner loops: interior of a beta arc ->
        Neumann, anything else (beta endpoints included) -> Dirichlet 0.
        """
        if not (isinstance(k, (int, float)) and math.isfinite(k) and k > 0):
            raise ValidationError(f"k must be a positive real, got {k!r}")
        alpha = tuple(tuple(a) for a in alpha_arcs)
        beta = tuple(tuple(a) for a in beta_arcs)
        ground = tuple(tuple(a) for a in ground_arcs)

        claimed: Dict[VertexId, str] = {}
        for label, arcs in (("alpha", alpha), ("beta", beta), ("ground", ground)):
            for ai, arc in enumerate(arcs):
                loop_idx = _check_arc(cx, arc, f"{label}[{ai}]")
                if label == "alpha" and loop_idx != 0:
                    raise ValidationError(f"alpha arc #{ai} must lie on the outer loop", {"arc": f"alpha[{ai}]"})
                if label == "beta" and loop_idx == 0:
                    raise ValidationError(f"beta arc #{ai} must lie on an inner loop", {"arc": f"beta[{ai}]"})
                for v in arc:
                    if v in claimed:
                        raise ValidationError(
                            f"overlapping arcs: vertex {v!r} is on {claimed[v]} and {label}[{ai}]",
                            {"vertex": v},
                        )
                    claimed[v] = f"{label}[{ai}]"

        roles: Dict[VertexId, Role] = {}
        for loop in cx.loops[1:]:
            for v in loop:
                roles[v] = Role.GROUND
        for v in cx.loops[0]:
            roles[v] = Role.NEUMANN
        for arc in alpha:
            for v in arc:
                roles[v] = Role.ALPHA
        for arc in ground:
            for v in arc:
                roles[v] = Role.GROUND
        for arc in beta:
            loop_len = len(cx.loops[cx.loop_of[arc[0]]])
            inner = arc if len(arc) == loop_len else arc[1:-1]
            for v in inner:
                roles[v] = Role.NEUMANN

        if Role.ALPHA not in roles.values():
            raise ValidationError("at least one alpha arc is required")
        if Role.GROUND not in roles.values():
            raise ValidationError("at least one Dirichlet-0 (ground) vertex is required")

        spec = cls(k=float(k), alpha_arcs=alpha, beta_arcs=beta, ground_arcs=ground, roles=roles)
        logger.debug(
            "complex.roles alpha=%d ground=%d neumann=%d",
            len(spec.alpha_set), len(spec.ground_set), len(spec.neumann_set),
        )
        return spec

    @cached_property
    def alpha_set(self) -> FrozenSet[VertexId]:
        return frozenset(v for v, r in self.roles.items() if r is Role.ALPHA)

    @cached_property
    def ground_set(self) -> FrozenSet[VertexId]:
        return frozenset(v for v, r in self.roles.items() if r is Role.GROUND)

    @cached_property
    def neumann_set(self) -> FrozenSet[VertexId]:
        return frozenset(v for v, r in self.roles.items() if r is Role.NEUMANN)

    def neumann_outer(self, cx: CellComplex) -> Tuple[VertexId, ...]:
        return tuple(v for v in cx.loops[0] if self.roles[v] is Role.NEUMANN)

    def dirichlet_value(self, v: VertexId) -> Optional[float]:
        role = self.roles.get(v)
        if role is Role.ALPHA:
            return self.k
        if role is Role.GROUND:
            return 0.0
        return None

    def dirichlet_values(self) -> Dict[VertexId, float]:
        return {v: (self.k if r is Role.ALPHA else 0.0) for v, r in self.roles.items() if r is not Role.NEUMANN}

    def named_arcs(self, cx: CellComplex) -> Dict[str, Tuple[VertexId, ...]]:
        """Arc name -> vertices, as used for flux totals."""
        arcs: Dict[str, Tuple[VertexId, ...]] = {}
        for i, arc in enumerate(self.alpha_arcs):
            arcs[f"alpha[{i}]"] = arc
        for i, arc in enumerate(self.beta_arcs):
            arcs[f"beta[{i}]"] = arc
        arcs["ground"] = tuple(v for loop in cx.loops for v in loop if self.roles[v] is Role.GROUND)
        arcs["neumann_outer"] = self.neumann_outer(cx)
        return arcs


def _check_arc(cx: CellComplex, arc: Sequence[VertexId], name: str) -> int:
    """Validate that *arc* is a contiguous path along one boundary loop."""
    if not arc:
        raise ValidationError(f"arc {name} is empty", {"arc": name})
    for v in arc:
        if v not in cx.coords:
            raise ValidationError(f"arc {name} references unknown vertex {v!r}", {"arc": name})
        if v not in cx.boundary_vertices:
            raise ValidationError(f"arc {name} vertex {v!r} is not on the boundary", {"arc": name})
    if len(set(arc)) != len(arc):
        raise ValidationError(f"arc {name} repeats a vertex", {"arc": name})
    loop_idx = cx.loop_of[arc[0]]
    loop = cx.loops[loop_idx]
    pos = {v: i for i, v in enumerate(loop)}
    if any(v not in pos for v in arc):
        raise ValidationError(f"arc {name} spans more than one boundary loop", {"arc": name})
    n = len(loop)
    if len(arc) > 1:
        step = (pos[arc[1]] - pos[arc[0]]) % n
        if step not in (1, n - 1):
            raise ValidationError(f"arc {name} is not a contiguous boundary path", {"arc": name})
        for a, b in zip(arc, arc[1:]):
            if (pos[b] - pos[a]) % n != step:
                raise ValidationError(f"arc {name} is not a contiguous boundary path", {"arc": name})
    return loop_idx


# ---------------------------------------------------------------------------
# Constant runs along boundary loops
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Run:
    loop: int
    vertices: Tuple[VertexId, ...]
    value: float
    closed: bool

    @property
    def endpoints(self) -> Tuple[VertexId, ...]:
        """Corner vertices of a proper run (none for a closed circle)."""
        if self.closed:
            return ()
        return (self.vertices[0], self.vertices[-1])


def constant_runs(
    loops: Sequence[Sequence[VertexId]],
    value_of: Mapping[VertexId, Optional[float]],
    *,
    tol: float = 1e-12,
) -> List[Run]:
    """Maximal runs of consecutive boundary vertices sharing a constant value.

    ``value_of[v]`` is the constant value carried by ``v`` or ``None`` for a
    Neumann vertex.  A loop that is constant all the way round yields one
    closed run, which contributes no endpoints.
    """
    runs: List[Run] = []
    for li, loop in enumerate(loops):
        n = len(loop)
        values = [value_of.get(v) for v in loop]

        def same(i: int, j: int) -> bool:
            a, b = values[i % n], values[j % n]
            return a is not None and b is not None and abs(a - b) <= tol

        if all(same(i, i + 1) for i in range(n)):
            runs.append(Run(loop=li, vertices=tuple(loop), value=float(values[0]), closed=True))
            continue
        start = next(i for i in range(n) if not same(i - 1, i))
        current: List[int] = []
        for step in range(n):
            i = (start + step) % n
            if values[i] is None:
                if current:
                    runs.append(_run(li, loop, current, values))
                    current = []
                continue
            if current and not same(current[-1], i):
                runs.append(_run(li, loop, current, values))
                current = []
            current.append(i)
        if current:
            runs.append(_run(li, loop, current, values))
    return runs


def _run(li: int, loop: Sequence[VertexId], idx: List[int], values: List[Optional[float]]) -> Run:
    return Run(loop=li, vertices=tuple(loop[i] for i in idx), value=float(values[idx[0]]), closed=False)


def count_arc_endpoints(runs: Iterable[Run]) -> int:
    """``t``: endpoints of maximal proper constant runs."""
    return sum(len(run.endpoints) for run in runs)


def boundary_runs(cx: CellComplex, spec: BoundarySpec) -> List[Run]:
    """Constant runs of the Dirichlet data along every loop; their endpoints are the corners."""
    return constant_runs(cx.loops, {v: spec.dirichlet_value(v) for v in cx.boundary_vertices})
