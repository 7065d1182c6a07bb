"""Tests for domain.decomp."""

from __future__ import annotations

from dataclasses import replace

import pytest

from domain.decomp import (
    ComponentKind,
    check_energy_partition,
    classify_component,
    extract_subdomains,
    singular_values,
    verify_gluing,
)
from domain.errors import UnclassifiableComponent, ValidationError
from domain.morse import index_formula_check
from domain.refine import RefinedComplex
from tests.conftest import QUAD_ENERGY


@pytest.fixture
def quad_split(quad, quad_g):
    cx, spec = quad
    rc = RefinedComplex.from_potential(cx, quad_g)
    levels = singular_values(index_formula_check(cx, spec, quad_g), quad_g)
    return rc, extract_subdomains(rc, spec, levels)


# ---------------------------------------------------------------------------
# FIX-QUAD: nothing to cut
# ---------------------------------------------------------------------------

class TestQuad:
    def test_levels_are_just_the_ends(self, quad, quad_g):
        cx, spec = quad
        assert singular_values(index_formula_check(cx, spec, quad_g), quad_g) == [0.0, 1.0]

    def test_single_quadrilateral(self, quad_split):
        _, subdomains = quad_split
        assert len(subdomains) == 1
        (comp,) = subdomains[0].components
        assert comp.kind is ComponentKind.QUADRILATERAL
        assert not comp.kind.cylinder
        assert comp.euler == 1
        assert comp.t == 4
        assert len(comp.corners) == 4
        assert comp.identified == {}

    def test_component_energy_is_the_total(self, quad_split):
        rc, subdomains = quad_split
        parts, total = check_energy_partition(subdomains, rc)
        assert parts == pytest.approx(float(QUAD_ENERGY), rel=1e-12)
        assert total == pytest.approx(parts, rel=1e-12)

    def test_no_seams(self, quad_split):
        rc, subdomains = quad_split
        assert verify_gluing(subdomains, rc) == []

    def test_cutting_at_half_gives_two_quadrilaterals(self, quad, quad_g):
        cx, spec = quad
        subdomains = extract_subdomains(RefinedComplex.from_potential(cx, quad_g), spec, [0.0, 0.5, 1.0])
        assert [sd.value_band for sd in subdomains] == [(0.0, 0.5), (0.5, 1.0)]
        assert all(c.kind is ComponentKind.QUADRILATERAL for sd in subdomains for c in sd.components)

    def test_needs_two_levels(self, quad, quad_g):
        cx, spec = quad
        with pytest.raises(ValidationError):
            extract_subdomains(RefinedComplex.from_potential(cx, quad_g), spec, [0.0])

    def test_unclassifiable(self, quad_split):
        _, subdomains = quad_split
        comp = replace(subdomains[0].components[0], euler=2)
        with pytest.raises(UnclassifiableComponent):
            classify_component(comp)

    def test_as_dict(self, quad_split):
        _, subdomains = quad_split
        data = subdomains[0].components[0].as_dict()
        assert data["kind"] == "quadrilateral"


# ---------------------------------------------------------------------------
# FIX-ANN: one boundary saddle
# ---------------------------------------------------------------------------

class TestAnnulus:
    def test_three_levels(self, ann_result):
        assert len(ann_result.levels) == 3
        assert 0.0 < ann_result.levels[1] < 1.0

    def test_sliced_quadrilateral_above_annulus_below(self, ann_result):
        lower, upper = ann_result.subdomains
        assert [c.kind for c in upper.components] == [ComponentKind.SLICED_QUADRILATERAL]
        assert [c.kind for c in lower.components] == [ComponentKind.ANNULUS]
        assert lower.components[0].kind.cylinder

    def test_saddle_is_split_in_the_upper_band(self, ann_result):
        saddle = ann_result.index.boundary_singular[0]
        upper = ann_result.subdomains[1].components[0]
        assert len(upper.identified[saddle]) == 2

    def test_energy_partition(self, ann_result):
        parts = sum(c.energy() for sd in ann_result.subdomains for c in sd.components)
        assert parts == pytest.approx(ann_result.energy, rel=1e-9)

    def test_seam_matches_from_both_sides(self, ann_result):
        (seam,) = ann_result.gluing
        assert seam.level == pytest.approx(ann_result.levels[1])
        assert seam.matched()
        assert not seam.closed
        assert seam.length_upper == pytest.approx(ann_result.energy, rel=1e-9)
        assert seam.length_lower == pytest.approx(seam.length_upper, rel=1e-9)


class TestPants:
    def test_one_outer_arc_kinds(self, pants1_result):
        kinds = sorted(c.kind.value for sd in pants1_result.subdomains for c in sd.components)
        assert kinds == ["annulus", "annulus", "singular_annulus", "sliced_quadrilateral"]

    def test_two_outer_arcs_share_the_boundary_level(self, pants2_result):
        index = pants2_result.index
        (saddle,) = index.interior_singular
        first, second = index.boundary_singular
        g = pants2_result.potential.values
        assert g[first] == pytest.approx(g[second], abs=1e-12)
        assert pants2_result.levels == pytest.approx([0.0, g[saddle], g[first], 1.0], abs=1e-12)
        assert g[saddle] < g[first]

    def test_two_outer_arcs_kinds(self, pants2_result):
        lower, middle, upper = pants2_result.subdomains
        assert [c.kind for c in lower.components] == [ComponentKind.ANNULUS] * 2
        assert [c.kind for c in middle.components] == [ComponentKind.SINGULAR_ANNULUS]
        assert [c.kind for c in upper.components] == [ComponentKind.QUADRILATERAL] * 2

    def test_figure_eight_splits_the_saddle(self, pants2_result):
        (saddle,) = pants2_result.index.interior_singular
        (middle,) = pants2_result.subdomains[1].components
        assert len(middle.identified[saddle]) == 2
        assert all(saddle not in c.identified for c in pants2_result.subdomains[0].components)

    def test_every_seam_matches(self, pants1_result, pants2_result):
        for result in (pants1_result, pants2_result):
            assert result.gluing
            assert all(edge.matched() for edge in result.gluing)

    def test_energy_partition(self, pants2_result):
        parts = sum(c.energy() for sd in pants2_result.subdomains for c in sd.components)
        assert parts == pytest.approx(pants2_result.energy, rel=1e-9)
