"""Tests for storage.fixtures."""

from __future__ import annotations

import pytest

from domain.errors import UnknownFixture
from storage.fixtures import NAMED_FIXTURES, TOPOLOGIES, gen_fixture
from storage.mesh_loader import load_complex


class TestNamedFixtures:
    def test_quad_document(self):
        doc = gen_fixture("FIX-QUAD")
        assert len(doc["vertices"]) == 6
        assert len(doc["edges"]) == 7
        assert len(doc["cells"]) == 2

    def test_quad_has_the_heavy_edge(self, quad):
        cx, _ = quad
        assert cx.conductance("1,0", "2,0") == 2.0
        assert cx.conductance("0,0", "1,0") == 1.0

    @pytest.mark.parametrize("name", NAMED_FIXTURES)
    def test_every_fixture_loads(self, name):
        cx, spec = load_complex(gen_fixture(name))
        assert spec.alpha_set
        assert spec.ground_set

    @pytest.mark.parametrize(
        "name, loops",
        [("FIX-QUAD", 1), ("FIX-ANN", 2), ("FIX-ANN-BOTH", 2), ("FIX-PANTS1", 3), ("FIX-PANTS2", 3), ("FIX-POLAR", 2)],
    )
    def test_boundary_components(self, name, loops):
        cx, _ = load_complex(gen_fixture(name))
        assert len(cx.loops) == loops
        assert cx.euler_characteristic() == 2 - loops

    def test_pants2_has_two_alpha_arcs(self):
        _, spec = load_complex(gen_fixture("FIX-PANTS2"))
        assert len(spec.alpha_arcs) == 2

    def test_pants2_is_unchanged_by_the_half_turn(self):
        # on the 10 x 8 grid the half turn sends vertex v to 98 - v
        cx, _ = load_complex(gen_fixture("FIX-PANTS2"))
        assert {98 - v for v in cx.coords} == set(cx.coords)
        for (u, v), c in cx.conductances.items():
            assert cx.conductance(98 - u, 98 - v) == c
        assert len(set(cx.conductances.values())) > 1

    def test_inner_beta_arc_is_neumann_inside(self):
        cx, spec = load_complex(gen_fixture("FIX-ANN-INNER"))
        inner = set(cx.loops[1])
        assert inner & spec.neumann_set
        assert inner & spec.ground_set

    def test_named_fixtures_are_stable(self):
        assert gen_fixture("FIX-ANN") == gen_fixture("FIX-ANN")


class TestRandomFixtures:
    @pytest.mark.parametrize("topology", TOPOLOGIES)
    def test_same_seed_same_document(self, topology):
        assert gen_fixture("random", seed=7, topology=topology) == gen_fixture("random", seed=7, topology=topology)

    def test_different_seeds_differ(self):
        assert gen_fixture("random", seed=1, topology="quad") != gen_fixture("random", seed=2, topology="quad")

    def test_conductances_in_range(self):
        doc = gen_fixture("random", seed=3, topology="annulus")
        assert all(1.0 <= edge["c"] <= 1.5 for edge in doc["edges"])

    def test_seed_is_required(self):
        with pytest.raises(UnknownFixture):
            gen_fixture("random", topology="quad")

    def test_unknown_topology(self):
        with pytest.raises(UnknownFixture):
            gen_fixture("random", seed=1, topology="torus")


class TestUnknownFixture:
    def test_unknown_name(self):
        with pytest.raises(UnknownFixture, match="FIX-QUAD"):
            gen_fixture("FIX-NOPE")

    def test_exit_code(self):
        with pytest.raises(UnknownFixture) as info:
            gen_fixture("FIX-NOPE")
        assert info.value.exit_code == 2
