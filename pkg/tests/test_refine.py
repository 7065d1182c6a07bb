"""Tests for domain.refine."""

from __future__ import annotations

from fractions import Fraction

import pytest

from domain.errors import DegenerateLevel, MissingValue, OutsideComplex, ValidationError
from domain.refine import (
    RefinedComplex,
    VertexKind,
    affine_value_at,
    insert_level_vertices,
    pad_combinatorial_distance,
    subdivide_edge,
)
from tests.conftest import QUAD_ENERGY, QUAD_EXACT


@pytest.fixture
def rc(quad, quad_g):
    cx, _ = quad
    return RefinedComplex.from_potential(cx, quad_g)


# ---------------------------------------------------------------------------
# Level insertion
# ---------------------------------------------------------------------------

class TestInsertLevel:
    def test_half_level_crosses_two_edges(self, rc):
        out = insert_level_vertices(rc, 0.5)
        assert out.type_i_count == 2
        assert set(out.added_by_id) == {"L0:0,0-1,0", "L0:0,1-1,1"}
        assert out.levels == (0.5,)

    def test_new_vertex_sits_at_the_affine_crossing(self, rc):
        out = insert_level_vertices(rc, 0.5)
        av = out.added_by_id["L0:0,0-1,0"]
        assert av.kind is VertexKind.TYPE_I
        assert av.t == pytest.approx(11 / 14)
        assert out.coords[av.id] == pytest.approx((11 / 14, 0.0))
        assert out.values[av.id] == 0.5

    def test_segment_conductance_scales_with_length(self, rc):
        out = insert_level_vertices(rc, 0.5)
        assert out.network.conductance("0,0", "L0:0,0-1,0") == pytest.approx(14 / 11)
        assert out.network.conductance("L0:0,0-1,0", "1,0") == pytest.approx(14 / 3)

    def test_level_above_a_vertex_value(self, rc):
        assert insert_level_vertices(rc, 0.6).type_i_count == 3

    @pytest.mark.parametrize("s", [0.0, 1.0])
    def test_extreme_levels_are_no_ops(self, rc, s):
        assert insert_level_vertices(rc, s) is rc

    def test_repeated_level_is_a_no_op(self, rc):
        once = insert_level_vertices(rc, 0.5)
        assert insert_level_vertices(once, 0.5 + 1e-12) is once

    def test_level_through_a_vertex_adds_nothing_there(self, rc):
        out = insert_level_vertices(rc, float(QUAD_EXACT["1,0"]))
        assert out.type_i_count == 1
        assert set(out.added_by_id) == {"L0:1,1-2,1"}

    def test_edge_lying_on_the_level(self, quad):
        cx, _ = quad
        values = {v: float(x) for v, x in QUAD_EXACT.items()}
        values["1,0"] = values["1,1"] = 0.5
        tied = RefinedComplex.from_potential(cx, values)
        with pytest.raises(DegenerateLevel):
            insert_level_vertices(tied, 0.5)

    def test_missing_value(self, quad):
        cx, _ = quad
        with pytest.raises(MissingValue):
            RefinedComplex.from_potential(cx, {"0,0": 0.0})


# ---------------------------------------------------------------------------
# Invariance under refinement
# ---------------------------------------------------------------------------

class TestInvariance:
    def test_added_vertices_are_harmonic(self, rc):
        out = insert_level_vertices(insert_level_vertices(rc, 0.5), 0.25)
        assert all(out.is_harmonic_at(av.id) for av in out.added)

    def test_energy_is_preserved(self, rc):
        out = insert_level_vertices(rc, 0.5)
        out = subdivide_edge(out, "L0:0,0-1,0", "1,0", 0.3)
        assert out.energy() == pytest.approx(float(QUAD_ENERGY), rel=1e-12)

    def test_subdivision_is_a_type_ii_vertex(self, rc):
        out = subdivide_edge(rc, "0,0", "0,1")
        assert out.type_ii_count == 1
        assert out.added[0].id == "P0:0,0-0,1"
        assert out.values["P0:0,0-0,1"] == 0.0

    def test_subdivision_parameter_must_be_interior(self, rc):
        with pytest.raises(ValidationError):
            subdivide_edge(rc, "0,0", "1,0", 1.0)

    def test_subdividing_a_non_edge(self, rc):
        with pytest.raises(ValidationError):
            subdivide_edge(rc, "0,0", "2,1")


# ---------------------------------------------------------------------------
# Pieces and padding
# ---------------------------------------------------------------------------

class TestPieces:
    def test_one_chord_splits_one_cell(self, rc):
        out = insert_level_vertices(rc, 0.5)
        assert len([c for c in out.chords if c.level == 0]) == 1
        assert len(out.pieces) == 3

    def test_segment_chain_runs_in_the_asked_direction(self, rc):
        out = insert_level_vertices(rc, 0.5)
        assert out.segment_chain("1,0", "0,0") == ("1,0", "L0:0,0-1,0", "0,0")
        assert out.host_of("L0:0,0-1,0", "1,0") == ("0,0", "1,0")


class TestPadding:
    def test_adjacent_levels_get_separated(self, rc):
        levels = [float(QUAD_EXACT["1,0"]), float(QUAD_EXACT["1,1"])]
        out = pad_combinatorial_distance(rc, levels)
        assert out.type_ii_count == 3
        upper = {v for v in out.vertex_ids if out.on_level(v, levels[0])}
        lower = {v for v in out.vertex_ids if out.on_level(v, levels[1])}
        for v in upper:
            assert not set(out.network.neighbors(v)) & lower

    def test_padding_keeps_the_energy(self, rc):
        out = pad_combinatorial_distance(rc, [float(QUAD_EXACT["1,0"]), float(QUAD_EXACT["1,1"])])
        assert out.energy() == pytest.approx(float(QUAD_ENERGY), rel=1e-12)


# ---------------------------------------------------------------------------
# Affine extension
# ---------------------------------------------------------------------------

class TestAffineValue:
    def test_midpoint_of_an_edge(self, quad, quad_g):
        cx, _ = quad
        assert affine_value_at(cx, quad_g, (0.5, 0.0)) == pytest.approx(float(Fraction(7, 22)))

    def test_vertex_value(self, quad, quad_g):
        cx, _ = quad
        assert affine_value_at(cx, quad_g, (1.0, 1.0)) == pytest.approx(6 / 11)

    def test_outside(self, quad, quad_g):
        cx, _ = quad
        with pytest.raises(OutsideComplex):
            affine_value_at(cx, quad_g, (5.0, 5.0))
