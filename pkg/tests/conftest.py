"""Shared pytest fixtures and helpers for the harmtile test suite."""

from __future__ import annotations

from fractions import Fraction

import pytest

from domain.bvp import solve_dn_bvp
from services.pipeline import Settings, run_pipeline
from storage.fixtures import fix_polar, fix_quad, gen_fixture
from storage.mesh_loader import load_complex

# Exact FIX-QUAD solution: g(1,0) = 7/11, g(1,1) = 6/11.
QUAD_EXACT = {
    "0,0": Fraction(0),
    "0,1": Fraction(0),
    "1,0": Fraction(7, 11),
    "1,1": Fraction(6, 11),
    "2,0": Fraction(1),
    "2,1": Fraction(1),
}
QUAD_ENERGY = Fraction(13, 11)

# Small rasters keep the pipeline fixtures fast; coverage tests use the full 1000.
FAST = Settings(raster=128)


@pytest.fixture
def quad_doc():
    """FIX-QUAD mesh document: two unit squares, c((1,0),(2,0)) = 2."""
    return fix_quad()


@pytest.fixture
def quad(quad_doc):
    """``(complex, boundary spec)`` for FIX-QUAD."""
    return load_complex(quad_doc)


@pytest.fixture
def quad_g(quad):
    """Solved FIX-QUAD potential."""
    cx, spec = quad
    return solve_dn_bvp(cx, spec)


@pytest.fixture
def polar():
    """Rotationally symmetric polar annulus, unit conductances, outer 1 and inner 0."""
    return load_complex(fix_polar())


def _pipeline(name):
    cx, spec = load_complex(gen_fixture(name))
    return run_pipeline(cx, spec, FAST)


@pytest.fixture(scope="session")
def ann_result():
    """Full pipeline run on FIX-ANN (one outer Neumann arc)."""
    return _pipeline("FIX-ANN")


@pytest.fixture(scope="session")
def pants1_result():
    """Full pipeline run on FIX-PANTS1."""
    return _pipeline("FIX-PANTS1")


@pytest.fixture(scope="session")
def pants2_result():
    """Full pipeline run on FIX-PANTS2."""
    return _pipeline("FIX-PANTS2")


@pytest.fixture(scope="session")
def quad_result():
    """Full pipeline run on FIX-QUAD."""
    cx, spec = load_complex(fix_quad())
    return run_pipeline(cx, spec, FAST)
