"""Mixed Dirichlet-Neumann problem on a weighted planar network.

The combinatorial Laplacian is ``Delta u(x) = sum_y c(x,y) (u(x) - u(y))``.
The solved potential ``g`` is pinned on Dirichlet vertices (``k`` on the alpha
arcs, ``0`` on the ground set) and satisfies ``Delta g = 0`` at every
interior and every Neumann vertex, summing over all incident edges.

Everything here accepts either a :class:`~domain.complex.CellComplex`, a
refined complex, or a bare :class:`~domain.complex.Network`.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning, cg, spsolve

from domain.complex import BoundarySpec, CellComplex, Network, VertexId
from domain.errors import (
    BadSubset,
    ConsistencyViolation,
    MissingValue,
    NotBoundary,
    SingularSystem,
    SolverDivergence,
    UnknownVertex,
)

logger = logging.getLogger(__name__)

SOLVE_TOL = 1e-12
CONSISTENCY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Potential:
    values: Mapping[VertexId, float]
    k: float
    spec: Optional[BoundarySpec] = None
    residual_norm: float = 0.0

    def __getitem__(self, v: VertexId) -> float:
        return self.values[v]

    def __contains__(self, v: object) -> bool:
        return v in self.values


@dataclass(frozen=True)
class FluxReport:
    per_vertex: Dict[VertexId, float]
    total: float
    arc_totals: Dict[str, float] = field(default_factory=dict)


Values = Union[Potential, Mapping[VertexId, float]]


def network_of(graph: Any) -> Network:
    """The weighted graph behind a complex, refined complex or network."""
    return graph if isinstance(graph, Network) else graph.network


def _values(g: Values) -> Mapping[VertexId, float]:
    return g.values if isinstance(g, Potential) else g


def _value(values: Mapping[VertexId, float], v: VertexId) -> float:
    try:
        return values[v]
    except KeyError:
        raise MissingValue(f"no value given for vertex {v!r}", {"vertex": v}) from None


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------

def laplacian_at(graph: Any, g: Values, v: VertexId, restrict_to: Optional[Iterable[VertexId]] = None) -> float:
    """Weighted difference sum at *v*, optionally over neighbours in *restrict_to* only."""
    net = network_of(graph)
    if not net.has_vertex(v):
        raise UnknownVertex(f"unknown vertex {v!r}", {"vertex": v})
    values = _values(g)
    allowed = None if restrict_to is None else set(restrict_to)
    gv = _value(values, v)
    total = 0.0
    for w, c in net.neighbors(v).items():
        if allowed is not None and w not in allowed:
            continue
        total += c * (gv - _value(values, w))
    return total


def dirichlet_energy(graph: Any, g: Values) -> float:
    """``E(g) = sum over edges of c (g(x) - g(y))**2``."""
    values = _values(g)
    return math.fsum(c * (_value(values, u) - _value(values, v)) ** 2 for u, v, c in network_of(graph).edges())


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

def _check_reachable(net: Network, fixed: Mapping[VertexId, float], unknown: List[VertexId]) -> None:
    graph = net.to_graph().subgraph(unknown)
    for part in nx.connected_components(graph):
        if not any(w in fixed for v in part for w in net.neighbors(v)):
            sample = sorted(map(str, part))[:5]
            logger.warning("bvp.singular unknowns=%d sample=%s", len(part), sample)
            raise SingularSystem(
                f"no Dirichlet vertex reachable from {len(part)} free vertices",
                {"vertices": sample},
            )


def _relative_residual(a: sparse.csr_matrix, x: np.ndarray, b: np.ndarray) -> float:
    scale = float(np.linalg.norm(b))
    resid = float(np.linalg.norm(a @ x - b))
    return resid / scale if scale > 0 else resid


def _solve_linear(a: sparse.csr_matrix, b: np.ndarray, tol: float) -> Tuple[np.ndarray, float]:
    """Direct sparse solve, falling back to conjugate gradients."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MatrixRankWarning)
        x = np.atleast_1d(spsolve(a.tocsc(), b))
    residual = _relative_residual(a, x, b) if np.all(np.isfinite(x)) else math.inf
    if residual <= tol:
        return x, residual

    logger.info("bvp.fallback method=cg direct_residual=%.3e", residual)
    x0 = x if np.all(np.isfinite(x)) else np.zeros_like(b)
    x, info = cg(a, b, x0=x0, rtol=tol, atol=0.0, maxiter=20 * max(1, b.size))
    residual = _relative_residual(a, x, b)
    if info != 0 and residual > tol:
        logger.warning("bvp.cg_failed info=%s residual=%.3e", info, residual)
    return x, residual


def assemble_system(
    net: Network, fixed: Mapping[VertexId, float]
) -> Tuple[List[VertexId], sparse.csr_matrix, np.ndarray]:
    """Rows ``Delta g(v) = 0`` for every free vertex, Dirichlet values moved right."""
    unknown = [v for v in net.vertex_ids if v not in fixed]
    index = {v: i for i, v in enumerate(unknown)}
    rows: List[int] = []
    cols: List[int] = []
    data: List[float] = []
    b = np.zeros(len(unknown))
    for v in unknown:
        i = index[v]
        diag = 0.0
        for w, c in net.neighbors(v).items():
            diag += c
            if w in index:
                rows.append(i)
                cols.append(index[w])
                data.append(-c)
            else:
                b[i] += c * fixed[w]
        rows.append(i)
        cols.append(i)
        data.append(diag)
    a = sparse.coo_matrix((data, (rows, cols)), shape=(len(unknown), len(unknown))).tocsr()
    return unknown, a, b


def solve_dn_bvp(cx: Any, spec: BoundarySpec, *, tol: float = SOLVE_TOL) -> Potential:
    """Solve the mixed problem; Dirichlet rows pinned, ``Delta g = 0`` elsewhere.

    Raises
    ------
    SingularSystem
        If some free vertices cannot reach any Dirichlet vertex.
    SolverDivergence
        If the relative residual stays above *tol*, or the solution leaves
        ``[0, k]``.
    """
    net = network_of(cx)
    fixed = spec.dirichlet_values()
    unknown, a, b = assemble_system(net, fixed)
    values: Dict[VertexId, float] = dict(fixed)

    residual = 0.0
    if unknown:
        _check_reachable(net, fixed, unknown)
        x, residual = _solve_linear(a, b, tol)
        if not residual <= tol:
            logger.warning("bvp.diverged unknowns=%d residual=%.3e", len(unknown), residual)
            raise SolverDivergence(
                f"relative residual {residual:.3e} exceeds tolerance {tol:.1e}",
                {"residual": residual, "tol": tol},
            )
        values.update(zip(unknown, (float(t) for t in x)))

    ordered = {v: values[v] for v in net.vertex_ids}
    lo, hi = min(ordered.values()), max(ordered.values())
    slack = 1e-9 * spec.k
    if lo < -slack or hi > spec.k + slack:
        raise SolverDivergence(
            f"solution violates the maximum principle: range [{lo!r}, {hi!r}] outside [0, {spec.k!r}]",
            {"min": lo, "max": hi},
        )
    logger.info("bvp.solved vertices=%d unknowns=%d residual=%.3e", len(ordered), len(unknown), residual)
    return Potential(values=ordered, k=spec.k, spec=spec, residual_norm=residual)


def dense_solve(cx: Any, spec: BoundarySpec) -> Dict[VertexId, float]:
    """Independent dense elimination of the same equations (small complexes)."""
    net = network_of(cx)
    fixed = spec.dirichlet_values()
    unknown = [v for v in net.vertex_ids if v not in fixed]
    n = len(unknown)
    index = {v: i for i, v in enumerate(unknown)}
    matrix = np.zeros((n, n))
    rhs = np.zeros(n)
    for v in unknown:
        i = index[v]
        for w, c in net.neighbors(v).items():
            matrix[i, i] += c
            if w in index:
                matrix[i, index[w]] -= c
            else:
                rhs[i] += c * fixed[w]
    solution = np.linalg.solve(matrix, rhs) if n else np.zeros(0)
    values = dict(fixed)
    values.update(zip(unknown, (float(t) for t in solution)))
    return {v: values[v] for v in net.vertex_ids}


# ---------------------------------------------------------------------------
# Fluxes
# ---------------------------------------------------------------------------

def normal_derivative(
    cx: Any,
    g: Values,
    arc: Iterable[VertexId],
    *,
    name: str = "arc",
    tol: float = 1e-9,
) -> FluxReport:
    """Flux at each vertex of a boundary arc.

    On a constant arc, edges whose far end lies on the same arc are skipped
    (they carry no drop).  On a non-constant arc every incident edge counts,
    so a Neumann arc of a solved system reports zero at every vertex.
    """
    net = network_of(cx)
    values = _values(g)
    members = list(arc)
    for v in members:
        if not net.has_vertex(v):
            raise UnknownVertex(f"unknown vertex {v!r}", {"vertex": v})
        if not net.is_boundary(v):
            raise NotBoundary(f"vertex {v!r} is not on the boundary", {"vertex": v})
    arc_values = [_value(values, v) for v in members]
    scale = max((abs(x) for x in values.values()), default=1.0) or 1.0
    constant = bool(members) and max(arc_values) - min(arc_values) <= tol * scale
    excluded = set(members) if constant else set()

    per_vertex: Dict[VertexId, float] = {}
    for v in members:
        gv = _value(values, v)
        per_vertex[v] = math.fsum(
            c * (gv - _value(values, w)) for w, c in net.neighbors(v).items() if w not in excluded
        )
    total = math.fsum(per_vertex.values())
    return FluxReport(per_vertex=per_vertex, total=total, arc_totals={name: total})


def check_consistency(cx: CellComplex, spec: BoundarySpec, g: Values, *, tol: float = CONSISTENCY_TOL) -> FluxReport:
    """Total boundary flux must vanish (to ``tol * E(g) / k``).

    Raises
    ------
    ConsistencyViolation
        When the total exceeds the tolerance.
    """
    values = _values(g)
    per_vertex = {v: laplacian_at(cx, values, v) for loop in cx.loops for v in loop}
    total = math.fsum(per_vertex.values())
    arc_totals = {
        name: normal_derivative(cx, values, arc, name=name).total
        for name, arc in spec.named_arcs(cx).items()
        if arc
    }
    energy = dirichlet_energy(cx, values)
    bound = tol * energy / spec.k if energy > 0 else tol
    report = FluxReport(per_vertex=per_vertex, total=total, arc_totals=arc_totals)
    if abs(total) > bound:
        logger.warning("bvp.inconsistent total=%.3e bound=%.3e", total, bound)
        raise ConsistencyViolation(
            f"total boundary flux {total:.3e} exceeds {bound:.3e}",
            {"total": total, "bound": bound, "arcs": arc_totals},
        )
    return report


# ---------------------------------------------------------------------------
# Green identity
# ---------------------------------------------------------------------------

def vertex_boundary(graph: Any, subset: Iterable[VertexId]) -> Tuple[frozenset, frozenset]:
    """``(F, delta F)``: the subset and the outside vertices adjacent to it."""
    net = network_of(graph)
    inner = frozenset(subset)
    if not inner:
        raise BadSubset("the vertex subset F is empty")
    unknown = [v for v in inner if not net.has_vertex(v)]
    if unknown:
        raise BadSubset(f"F contains unknown vertices: {sorted(map(str, unknown))[:5]}")
    rim = frozenset(w for v in inner for w in net.neighbors(v) if w not in inner)
    return inner, rim


def green_identity_sides(graph: Any, subset: Iterable[VertexId], u: Values, v: Values) -> Tuple[float, float]:
    """Left and right sides of the first Green identity on ``F``.

    ``sum_{edges touching F} c (u(x)-u(y)) (v(x)-v(y))``
    against ``sum_F Delta u * v + sum_{delta F} du/dn(F) * v``.
    """
    net = network_of(graph)
    inner, rim = vertex_boundary(net, subset)
    uu, vv = _values(u), _values(v)

    lhs_terms = []
    for x, y, c in net.edges():
        if x in inner or y in inner:
            lhs_terms.append(c * (_value(uu, x) - _value(uu, y)) * (_value(vv, x) - _value(vv, y)))

    rhs_terms = [laplacian_at(net, uu, x) * _value(vv, x) for x in inner]
    for x in rim:
        rhs_terms.append(laplacian_at(net, uu, x, restrict_to=inner) * _value(vv, x))
    return math.fsum(lhs_terms), math.fsum(rhs_terms)


def green_identity_residual(graph: Any, subset: Iterable[VertexId], u: Values, v: Values) -> float:
    lhs, rhs = green_identity_sides(graph, subset, u, v)
    return abs(lhs - rhs)
