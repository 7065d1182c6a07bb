"""Tests for storage.reports and the SVG renderer."""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

from cli.svg import SVG, angle_label, render_component
from storage.reports import dumps, json_safe, read_json, write_json, write_svg


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

class TestJsonSafe:
    def test_fraction_becomes_text(self):
        assert json_safe({"i": Fraction(-1, 2)}) == {"i": "-1/2"}

    def test_non_finite_floats(self):
        assert json_safe([math.inf, math.nan]) == ["inf", "nan"]

    def test_numpy_scalars(self):
        assert json_safe(np.float64(0.25)) == 0.25
        assert isinstance(json_safe(np.int64(3)), int)

    def test_tuple_keys_and_values(self):
        assert json_safe({1: (2, 3)}) == {"1": [2, 3]}

    def test_floats_round_trip(self):
        x = 7 / 11
        assert json.loads(dumps({"x": x}))["x"] == x


class TestWrite:
    def test_write_and_read(self, tmp_path):
        path = write_json(tmp_path / "a" / "b.json", {"v": Fraction(1, 3)})
        assert read_json(path) == {"v": "1/3"}
        assert not (tmp_path / "a" / "b.json.tmp").exists()

    def test_write_svg(self, tmp_path):
        path = write_svg(tmp_path / "c.svg", "<svg/>")
        assert path.read_text(encoding="utf-8") == "<svg/>"


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

class TestSVG:
    def test_angle_labels(self):
        assert angle_label(Fraction(1, 2)) == "π/2"
        assert angle_label(Fraction(1)) == "π"
        assert angle_label(Fraction(4)) == "4π"
        assert angle_label(Fraction(3, 2)) == "3π/2"

    def test_y_is_flipped(self):
        svg = SVG(scale=10.0)
        svg.rect(0.0, 1.0, 2.0, 3.0)
        out = svg.render()
        assert 'y="-3"' in out
        assert 'height="2"' in out

    def test_titles_are_escaped(self):
        svg = SVG()
        svg.rect(0.0, 0.0, 1.0, 1.0, title="a<b")
        assert "a&lt;b" in svg.render()

    def test_render_quad_component(self, quad_result):
        out = render_component(quad_result.tiled[0], scale=100.0)
        assert out.startswith("<?xml")
        assert out.rstrip().endswith("</svg>")
        assert out.count("<rect") == 5
        assert out.count("<circle") == 4

    def test_render_without_labels(self, quad_result):
        with_labels = render_component(quad_result.tiled[0])
        out = render_component(quad_result.tiled[0], labels=False)
        assert with_labels.count("<text") == 9
        assert out.count("<text") == 4
