"""Tests for domain.morse."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from domain.bvp import dirichlet_energy, solve_dn_bvp
from domain.errors import SideUndefined, TieError, ValidationError
from domain.morse import (
    flux_length,
    group_levels,
    index_formula_check,
    neighbour_signs,
    side_flux,
    sign_changes,
    trace_level_curve,
)
from domain.refine import RefinedComplex
from storage.fixtures import gen_fixture
from storage.mesh_loader import load_complex


def _solved(name):
    cx, spec = load_complex(gen_fixture(name))
    return cx, spec, solve_dn_bvp(cx, spec)


# ---------------------------------------------------------------------------
# Sign changes
# ---------------------------------------------------------------------------

class TestSignChanges:
    def test_quad_neighbour_signs(self, quad, quad_g):
        cx, _ = quad
        assert neighbour_signs(cx, quad_g, "1,0") == [1, -1, -1]
        assert neighbour_signs(cx, quad_g, "1,1") == [-1, 1, 1]

    def test_boundary_fan_is_not_cyclic(self, quad, quad_g):
        cx, _ = quad
        assert sign_changes(cx, quad_g, "1,0") == 1

    def test_tie_without_perturbation(self, polar):
        cx, spec = polar
        g = solve_dn_bvp(cx, spec)
        with pytest.raises(TieError):
            index_formula_check(cx, spec, g)

    def test_tie_broken_by_id_order(self, quad):
        cx, _ = quad
        values = {"0,0": 0.0, "0,1": 0.0, "1,0": 0.5, "1,1": 0.5, "2,0": 1.0, "2,1": 1.0}
        assert neighbour_signs(cx, values, "1,0", tie_perturb=True) == [1, 1, -1]


# ---------------------------------------------------------------------------
# Index formula
# ---------------------------------------------------------------------------

class TestIndexFormula:
    def test_quad(self, quad, quad_g):
        cx, spec = quad
        report = index_formula_check(cx, spec, quad_g)
        assert report.total == 0
        assert report.t == 4
        assert report.euler == 1
        assert report.singular_vertices == ()
        assert set(report.corners) == {"0,0", "0,1", "2,0", "2,1"}
        assert report.per_vertex["1,0"].index == 0

    def test_annulus_has_one_boundary_saddle(self):
        cx, spec, g = _solved("FIX-ANN")
        report = index_formula_check(cx, spec, g)
        assert report.total == Fraction(-1, 2)
        assert report.t == 2
        assert report.interior_singular == ()
        assert len(report.boundary_singular) == 1
        assert report.per_vertex[report.boundary_singular[0]].sgc == 2

    @pytest.mark.parametrize(
        "name, total, t",
        [
            ("FIX-ANN-INNER", Fraction(-1, 2), 2),
            ("FIX-ANN-BOTH", Fraction(-1), 4),
            ("FIX-PANTS1", Fraction(-3, 2), 2),
            ("FIX-PANTS2", Fraction(-2), 4),
        ],
    )
    def test_named_fixtures(self, name, total, t):
        cx, spec, g = _solved(name)
        report = index_formula_check(cx, spec, g)
        assert report.total == total
        assert report.t == t
        assert report.expected == report.total

    def test_as_dict_uses_exact_strings(self, quad, quad_g):
        cx, spec = quad
        data = index_formula_check(cx, spec, quad_g).as_dict()
        assert data["totalIndex"] == "0"
        assert data["arcEndpointCount"] == 4


# ---------------------------------------------------------------------------
# Levels
# ---------------------------------------------------------------------------

class TestGroupLevels:
    def test_close_values_merge(self):
        assert group_levels([1.0, 0.5, 0.5 + 1e-12, 0.0], k=1.0) == [0.0, 0.5, 1.0]

    def test_distinct_values_stay(self):
        assert group_levels([0.25, 0.75], k=1.0) == [0.25, 0.75]


class TestTraceLevelCurve:
    def test_quad_half_level(self, quad, quad_g):
        cx, _ = quad
        curve = trace_level_curve(RefinedComplex.from_potential(cx, quad_g), 0.5)
        assert len(curve.components) == 1
        comp = curve.components[0]
        assert not comp.closed
        assert set(comp.boundary_ends) == {"L0:0,0-1,0", "L0:0,1-1,1"}
        assert comp.singular == ()
        assert len(curve.polyline(comp.chains[0])) >= 2

    def test_saddle_is_on_its_level_curve(self):
        cx, spec, g = _solved("FIX-ANN")
        saddle = index_formula_check(cx, spec, g).boundary_singular[0]
        curve = trace_level_curve(RefinedComplex.from_potential(cx, g), g[saddle])
        assert saddle in curve.singular_vertices
        comp = next(c for c in curve.components if saddle in c.vertices)
        assert comp.arc_count[saddle] == 2


class TestFluxLength:
    @pytest.mark.parametrize("side", ["lower", "upper"])
    def test_quad_cut_carries_the_energy(self, quad, quad_g, side):
        cx, _ = quad
        curve = trace_level_curve(RefinedComplex.from_potential(cx, quad_g), 0.5)
        assert flux_length(curve.refined, curve.components[0], side) == pytest.approx(13 / 11)

    @pytest.mark.parametrize("s", [float(s) for s in np.linspace(0.02, 0.98, 20)])
    def test_quad_length_is_the_same_on_every_level(self, quad, quad_g, s):
        cx, _ = quad
        curve = trace_level_curve(RefinedComplex.from_potential(cx, quad_g), s)
        (comp,) = curve.components
        for side in ("lower", "upper"):
            assert flux_length(curve.refined, comp, side) == pytest.approx(13 / 11, rel=1e-9)

    @pytest.mark.parametrize("s", [float(s) for s in np.linspace(0.02, 0.98, 20)])
    def test_flux_from_the_two_sides_is_opposite(self, quad, quad_g, s):
        cx, _ = quad
        curve = trace_level_curve(RefinedComplex.from_potential(cx, quad_g), s)
        (comp,) = curve.components
        lower = sum(side_flux(curve.refined, x, s, "lower") for x in comp.vertices)
        upper = sum(side_flux(curve.refined, x, s, "upper") for x in comp.vertices)
        assert lower == pytest.approx(13 / 11, rel=1e-9)
        assert upper == pytest.approx(-lower, rel=1e-9)

    @pytest.mark.parametrize("s", [0.1371, 0.4219, 0.8713])
    def test_annulus_level_sets_carry_the_energy(self, s):
        cx, _, g = _solved("FIX-ANN")
        curve = trace_level_curve(RefinedComplex.from_potential(cx, g), s)
        total = sum(flux_length(curve.refined, comp) for comp in curve.components)
        assert total == pytest.approx(dirichlet_energy(cx, g), rel=1e-9)

    def test_no_lower_side_at_ground(self, quad, quad_g):
        cx, _ = quad
        with pytest.raises(SideUndefined):
            flux_length(RefinedComplex.from_potential(cx, quad_g), ["0,0", "0,1"])

    def test_bad_side(self, quad, quad_g):
        cx, _ = quad
        with pytest.raises(ValidationError):
            flux_length(RefinedComplex.from_potential(cx, quad_g), ["0,0"], "left")
