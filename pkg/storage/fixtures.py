"""Deterministic mesh documents for the named fixtures and seeded random ones.

Grid fixtures triangulate the unit squares of an ``nx x ny`` grid, leave out
rectangular holes, and draw conductances ``1 + 0.5 u`` from a seeded
generator in sorted edge order.  Documents are validated by building the
complex before they are returned.
"""

from __future__ import annotations

import logging
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from domain.complex import BoundarySpec, CellComplex, VertexId, edge_key, id_key, signed_area
from domain.errors import UnknownFixture, ValidationError
from storage.mesh_loader import dump_complex

logger = logging.getLogger(__name__)

Hole = Tuple[int, int, int, int]

NAMED_FIXTURES: Tuple[str, ...] = (
    "FIX-QUAD",
    "FIX-ANN",
    "FIX-ANN-INNER",
    "FIX-ANN-BOTH",
    "FIX-PANTS1",
    "FIX-PANTS2",
    "FIX-POLAR",
)
TOPOLOGIES: Tuple[str, ...] = ("quad", "annulus", "pants")

_ANNULUS_HOLE: Hole = (2, 2, 4, 4)
_PANTS_HOLES: Tuple[Hole, ...] = ((5, 1, 7, 3), (5, 5, 7, 7))
# centred under the half turn about (5, 4)
_SYMMETRIC_PANTS_HOLES: Tuple[Hole, ...] = ((4, 1, 6, 3), (4, 5, 6, 7))


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

class _Grid:
    """Triangulated grid with integer ids ``j * (nx + 1) + i``.

    With ``half_turn`` an edge and its image under ``(i, j) -> (nx - i, ny - j)``
    share one conductance; the holes must then be symmetric too.
    """

    def __init__(
        self,
        nx: int,
        ny: int,
        holes: Sequence[Hole] = (),
        seed: Optional[int] = None,
        *,
        half_turn: bool = False,
    ):
        self.nx, self.ny = nx, ny
        self.cells: List[Tuple[int, int, int]] = []
        for j in range(ny):
            for i in range(nx):
                if any(x0 <= i and i + 1 <= x1 and y0 <= j and j + 1 <= y1 for x0, y0, x1, y1 in holes):
                    continue
                a, b, c, d = self.vid(i, j), self.vid(i + 1, j), self.vid(i + 1, j + 1), self.vid(i, j + 1)
                self.cells.extend([(a, b, c), (a, c, d)])
        used = {v for cell in self.cells for v in cell}
        self.coords: Dict[int, Tuple[float, float]] = {
            self.vid(i, j): (float(i), float(j))
            for j in range(ny + 1)
            for i in range(nx + 1)
            if self.vid(i, j) in used
        }
        keys = sorted({edge_key(cell[m], cell[(m + 1) % 3]) for cell in self.cells for m in range(3)})
        if seed is None:
            weights = np.ones(len(keys))
        else:
            weights = 1.0 + 0.5 * np.random.default_rng(seed).random(len(keys))
        if half_turn:
            position = {key: n for n, key in enumerate(keys)}
            self.conductances = {
                key: float(weights[min(position[key], position[self.turned(key)])]) for key in keys
            }
        else:
            self.conductances = {key: float(w) for key, w in zip(keys, weights)}
        self.loops = _trace_loops(self.cells, self.coords)

    def vid(self, i: int, j: int) -> int:
        return j * (self.nx + 1) + i

    def turned(self, key: Tuple[int, int]) -> Tuple[int, int]:
        """Image of an edge under the half turn about the grid centre."""
        def image(v: int) -> int:
            j, i = divmod(v, self.nx + 1)
            return self.vid(self.nx - i, self.ny - j)

        return edge_key(image(key[0]), image(key[1]))

    def x(self, v: VertexId) -> float:
        return self.coords[v][0]

    def complex(self) -> CellComplex:
        return CellComplex.build(
            [(v, x, y) for v, (x, y) in self.coords.items()],
            [(u, v, c) for (u, v), c in self.conductances.items()],
            self.cells,
            self.loops,
        )


def _trace_loops(cells: Sequence[Sequence[VertexId]], coords: Dict[Any, Tuple[float, float]]) -> List[Tuple[VertexId, ...]]:
    """Boundary loops, region on the left, outer loop first, each starting at its lowest id."""
    directed = {(cell[m], cell[(m + 1) % len(cell)]) for cell in cells for m in range(len(cell))}
    nxt = {a: b for a, b in directed if (b, a) not in directed}
    loops: List[Tuple[VertexId, ...]] = []
    remaining = set(nxt)
    while remaining:
        start = min(remaining, key=id_key)
        loop = [start]
        remaining.discard(start)
        cur = nxt[start]
        while cur != start:
            loop.append(cur)
            remaining.discard(cur)
            cur = nxt[cur]
        loops.append(tuple(loop))
    loops.sort(key=lambda loop: -signed_area([coords[v] for v in loop]))
    return loops


def _arc_where(loop: Sequence[VertexId], keep: Callable[[VertexId], bool]) -> Tuple[VertexId, ...]:
    """The contiguous run of *loop* whose vertices satisfy *keep*."""
    n = len(loop)
    flags = [keep(v) for v in loop]
    if all(flags):
        return tuple(loop)
    starts = [i for i in range(n) if flags[i] and not flags[i - 1]]
    if len(starts) != 1:
        raise ValidationError(f"selection is not one contiguous arc ({len(starts)} runs)")
    arc = []
    i = starts[0]
    while flags[i % n]:
        arc.append(loop[i % n])
        i += 1
    return tuple(arc)


def _document(cx: CellComplex, k: float, alpha=(), beta=(), ground=()) -> Dict[str, Any]:
    spec = BoundarySpec.build(cx, k, alpha, beta, ground)
    return dump_complex(cx, spec)


# ---------------------------------------------------------------------------
# Named fixtures
# ---------------------------------------------------------------------------

def fix_quad() -> Dict[str, Any]:
    """2 x 1 grid of unit squares; ``c((1,0),(2,0)) = 2``; left 0, right 1."""
    coords = {f"{i},{j}": (float(i), float(j)) for j in range(2) for i in range(3)}
    edges = [(f"{i},{j}", f"{i + 1},{j}", 1.0) for j in range(2) for i in range(2)]
    edges += [(f"{i},0", f"{i},1", 1.0) for i in range(3)]
    edges[1] = ("1,0", "2,0", 2.0)
    cells = [("0,0", "1,0", "1,1", "0,1"), ("1,0", "2,0", "2,1", "1,1")]
    loops = [("0,0", "1,0", "2,0", "2,1", "1,1", "0,1")]
    cx = CellComplex.build([(v, x, y) for v, (x, y) in coords.items()], edges, cells, loops)
    return _document(cx, 1.0, alpha=[("2,0", "2,1")], ground=[("0,1", "0,0")])


def _annulus(seed: int, *, outer_alpha_all: bool = False, inner_beta: bool = False) -> Dict[str, Any]:
    grid = _Grid(6, 6, [_ANNULUS_HOLE], seed=seed)
    cx = grid.complex()
    outer, inner = cx.loops[0], cx.loops[1]
    alpha = [tuple(outer)] if outer_alpha_all else [_arc_where(outer, lambda v: grid.x(v) == 6)]
    beta = [_arc_where(inner, lambda v: grid.x(v) == 2)] if inner_beta else []
    return _document(cx, 1.0, alpha=alpha, beta=beta)


def _pants(seed: int, *, two_arcs: bool, half_turn: bool = False) -> Dict[str, Any]:
    holes = _SYMMETRIC_PANTS_HOLES if half_turn else _PANTS_HOLES
    grid = _Grid(10, 8, holes, seed=seed, half_turn=half_turn)
    cx = grid.complex()
    outer = cx.loops[0]
    alpha = [_arc_where(outer, lambda v: grid.x(v) == 10)]
    if two_arcs:
        alpha.append(_arc_where(outer, lambda v: grid.x(v) == 0))
    return _document(cx, 1.0, alpha=alpha)


def fix_polar(rings: int = 4, sectors: int = 16, r0: float = 1.0, r1: float = 2.0) -> Dict[str, Any]:
    """Rotationally symmetric annulus of quads, unit conductances, pure Dirichlet data."""
    coords = {}
    for i in range(rings + 1):
        r = r0 + (r1 - r0) * i / rings
        for j in range(sectors):
            theta = 2.0 * math.pi * j / sectors
            coords[i * sectors + j] = (r * math.cos(theta), r * math.sin(theta))
    cells = []
    for i in range(rings):
        for j in range(sectors):
            jn = (j + 1) % sectors
            cells.append((i * sectors + j, (i + 1) * sectors + j, (i + 1) * sectors + jn, i * sectors + jn))
    edges = {edge_key(cell[m], cell[(m + 1) % 4]) for cell in cells for m in range(4)}
    cx = CellComplex.build(
        [(v, x, y) for v, (x, y) in coords.items()],
        [(u, v, 1.0) for u, v in sorted(edges)],
        cells,
        _trace_loops(cells, coords),
    )
    return _document(cx, 1.0, alpha=[cx.loops[0]])


def random_fixture(seed: int, topology: str) -> Dict[str, Any]:
    """Seeded fixture of the given topology: the same document for the same seed."""
    if topology not in TOPOLOGIES:
        raise UnknownFixture(f"unknown topology {topology!r}; expected one of {list(TOPOLOGIES)}", {"topology": topology})
    rng = np.random.default_rng(seed)
    if topology == "quad":
        nx_, ny = int(rng.integers(2, 7)), int(rng.integers(1, 5))
        grid = _Grid(nx_, ny, seed=int(rng.integers(2**31)))
        cx = grid.complex()
        outer = cx.loops[0]
        return _document(
            cx,
            1.0,
            alpha=[_arc_where(outer, lambda v: grid.x(v) == nx_)],
            ground=[_arc_where(outer, lambda v: grid.x(v) == 0)],
        )
    if topology == "annulus":
        return _annulus(int(rng.integers(2**31)))
    return _pants(int(rng.integers(2**31)), two_arcs=bool(rng.integers(2)))


_BUILDERS: Dict[str, Callable[[], Dict[str, Any]]] = {
    "FIX-QUAD": fix_quad,
    "FIX-ANN": lambda: _annulus(2),
    "FIX-ANN-INNER": lambda: _annulus(3, outer_alpha_all=True, inner_beta=True),
    "FIX-ANN-BOTH": lambda: _annulus(4, inner_beta=True),
    "FIX-PANTS1": lambda: _pants(5, two_arcs=False),
    # the two boundary saddles trade places under the half turn, so they share a level
    "FIX-PANTS2": lambda: _pants(6, two_arcs=True, half_turn=True),
    "FIX-POLAR": fix_polar,
}


def gen_fixture(name: str, *, seed: Optional[int] = None, topology: Optional[str] = None) -> Dict[str, Any]:
    """Build the mesh document for a named fixture, or ``random`` with a seed and topology.

    Raises
    ------
    UnknownFixture
        If the name (or the random topology) is not known.
    """
    if name == "random":
        if seed is None or topology is None:
            raise UnknownFixture("random fixtures need both a seed and a topology", {"fixture": name})
        doc = random_fixture(seed, topology)
    else:
        builder = _BUILDERS.get(name)
        if builder is None:
            raise UnknownFixture(
                f"unknown fixture {name!r}; expected one of {list(NAMED_FIXTURES) + ['random']}",
                {"fixture": name},
            )
        doc = builder()
    logger.info("fixtures.generated name=%s vertices=%d edges=%d", name, len(doc["vertices"]), len(doc["edges"]))
    return doc
