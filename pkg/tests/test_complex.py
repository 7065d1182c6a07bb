"""Tests for domain.complex."""

from __future__ import annotations

import pytest

from domain.complex import (
    BoundarySpec,
    CellComplex,
    Role,
    boundary_runs,
    cell_triangles,
    constant_runs,
    count_arc_endpoints,
    edge_key,
    id_key,
    quad_diagonal,
)
from domain.errors import UnknownVertex, ValidationError


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _square(c=1.0, orientation="ccw"):
    vertices = [(0, 0.0, 0.0), (1, 1.0, 0.0), (2, 1.0, 1.0), (3, 0.0, 1.0)]
    edges = [(0, 1, c), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]
    cell = (0, 1, 2, 3) if orientation == "ccw" else (0, 3, 2, 1)
    return vertices, edges, [cell], [(0, 1, 2, 3)]


# ---------------------------------------------------------------------------
# Ids and small helpers
# ---------------------------------------------------------------------------

class TestIds:
    def test_integers_order_before_strings(self):
        assert sorted(["b", 3, "a", 1], key=id_key) == [1, 3, "a", "b"]

    def test_edge_key_is_symmetric(self):
        assert edge_key(5, 2) == edge_key(2, 5) == (2, 5)

    def test_quad_diagonal_starts_at_lowest_id(self):
        cell = ("1,0", "2,0", "2,1", "1,1")
        i, j = quad_diagonal(cell)
        assert (cell[i], cell[j]) == ("1,0", "2,1")

    def test_quad_splits_into_two_ccw_triangles(self):
        tris = cell_triangles((0, 1, 2, 3))
        assert tris == ((0, 1, 2), (0, 2, 3))


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

class TestBuild:
    def test_quad_counts(self, quad):
        cx, _ = quad
        assert len(cx.coords) == 6
        assert len(cx.conductances) == 7
        assert len(cx.cells) == 2
        assert cx.euler_characteristic() == 1

    def test_every_vertex_is_on_the_boundary(self, quad):
        cx, _ = quad
        assert cx.boundary_vertices == frozenset(cx.coords)

    def test_boundary_star_is_counterclockwise_fan(self, quad):
        cx, _ = quad
        assert cx.vertex_star("1,0") == ("2,0", "1,1", "0,0")
        assert cx.vertex_star("1,1") == ("0,1", "1,0", "2,1")

    def test_unknown_vertex(self, quad):
        cx, _ = quad
        with pytest.raises(UnknownVertex):
            cx.vertex_star("9,9")

    def test_loop_is_reoriented_with_region_on_left(self):
        vertices, edges, cells, _ = _square()
        cx = CellComplex.build(vertices, edges, cells, [(0, 3, 2, 1)])
        assert cx.loops[0] == (0, 1, 2, 3)

    def test_non_positive_conductance(self):
        vertices, edges, cells, loops = _square(c=0.0)
        with pytest.raises(ValidationError, match="non-positive conductance"):
            CellComplex.build(vertices, edges, cells, loops)

    def test_duplicate_edge(self):
        vertices, edges, cells, loops = _square()
        with pytest.raises(ValidationError, match="duplicate edge"):
            CellComplex.build(vertices, edges + [(1, 0, 2.0)], cells, loops)

    def test_dangling_vertex(self):
        vertices, edges, cells, loops = _square()
        with pytest.raises(ValidationError, match="dangling"):
            CellComplex.build(vertices + [(9, 5.0, 5.0)], edges, cells, loops)

    def test_clockwise_cell(self):
        vertices, edges, cells, loops = _square(orientation="cw")
        with pytest.raises(ValidationError, match="counterclockwise"):
            CellComplex.build(vertices, edges, cells, loops)

    def test_self_loop(self):
        vertices, edges, cells, loops = _square()
        with pytest.raises(ValidationError, match="self-loop"):
            CellComplex.build(vertices, edges + [(2, 2, 1.0)], cells, loops)

    def test_single_square(self):
        cx = CellComplex.build(*_square())
        assert (len(cx.coords), len(cx.conductances), len(cx.cells), len(cx.loops)) == (4, 4, 1, 1)
        assert cx.euler_characteristic() == 1

    def test_edge_in_three_cells(self):
        vertices = [(0, 0.0, 0.0), (1, 1.0, 0.0), (2, 0.5, 1.0), (3, 0.5, -1.0), (4, 0.5, 2.0)]
        edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (0, 3, 1.0), (1, 3, 1.0), (1, 4, 1.0), (4, 0, 1.0)]
        cells = [(0, 1, 2), (1, 0, 3), (0, 1, 4)]
        with pytest.raises(ValidationError, match="non-manifold edge"):
            CellComplex.build(vertices, edges, cells, [(0, 3, 1, 4)])

    def test_missing_loop_edge(self):
        vertices, edges, cells, _ = _square()
        with pytest.raises(ValidationError):
            CellComplex.build(vertices, edges, cells, [(0, 1, 2)])


# ---------------------------------------------------------------------------
# Boundary roles
# ---------------------------------------------------------------------------

class TestBoundarySpec:
    def test_quad_roles(self, quad):
        _, spec = quad
        assert spec.alpha_set == frozenset({"2,0", "2,1"})
        assert spec.ground_set == frozenset({"0,0", "0,1"})
        assert spec.neumann_set == frozenset({"1,0", "1,1"})
        assert spec.roles["1,0"] is Role.NEUMANN

    def test_dirichlet_values(self, quad):
        _, spec = quad
        assert spec.dirichlet_value("2,0") == 1.0
        assert spec.dirichlet_value("0,1") == 0.0
        assert spec.dirichlet_value("1,1") is None

    def test_k_must_be_positive(self, quad):
        cx, _ = quad
        with pytest.raises(ValidationError, match="k must be a positive"):
            BoundarySpec.build(cx, 0.0, [("2,0", "2,1")], ground_arcs=[("0,1", "0,0")])

    def test_ground_is_required_on_a_disk(self, quad):
        cx, _ = quad
        with pytest.raises(ValidationError, match="ground"):
            BoundarySpec.build(cx, 1.0, [("2,0", "2,1")])

    def test_overlapping_arcs(self, quad):
        cx, _ = quad
        with pytest.raises(ValidationError, match="overlapping"):
            BoundarySpec.build(cx, 1.0, [("2,0", "2,1")], ground_arcs=[("2,1", "1,1")])

    def test_non_contiguous_arc(self, quad):
        cx, _ = quad
        with pytest.raises(ValidationError, match="contiguous"):
            BoundarySpec.build(cx, 1.0, [("2,0", "0,0")], ground_arcs=[("0,1",)])

    def test_named_arcs(self, quad):
        cx, spec = quad
        arcs = spec.named_arcs(cx)
        assert arcs["alpha[0]"] == ("2,0", "2,1")
        assert set(arcs["ground"]) == {"0,0", "0,1"}
        assert set(arcs["neumann_outer"]) == {"1,0", "1,1"}


# ---------------------------------------------------------------------------
# Constant runs
# ---------------------------------------------------------------------------

class TestConstantRuns:
    def test_quad_has_four_corners(self, quad):
        cx, spec = quad
        runs = boundary_runs(cx, spec)
        assert count_arc_endpoints(runs) == 4
        assert {v for run in runs for v in run.endpoints} == {"0,0", "0,1", "2,0", "2,1"}

    def test_closed_loop_has_no_endpoints(self):
        runs = constant_runs([(1, 2, 3)], {1: 0.0, 2: 0.0, 3: 0.0})
        assert len(runs) == 1
        assert runs[0].closed
        assert count_arc_endpoints(runs) == 0

    def test_runs_wrap_around_the_loop_start(self):
        runs = constant_runs([(1, 2, 3, 4)], {1: 1.0, 2: None, 3: None, 4: 1.0})
        assert len(runs) == 1
        assert runs[0].vertices == (4, 1)

    def test_different_values_split_runs(self):
        runs = constant_runs([(1, 2, 3, 4)], {1: 1.0, 2: 1.0, 3: 0.0, 4: 0.0})
        assert count_arc_endpoints(runs) == 4
