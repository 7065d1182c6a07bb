"""Tests for the run configuration and the JSON envelopes."""

import argparse
import pathlib

import pytest

from cli.schemas import VERSION, RunConfig, error_envelope, success_envelope
from domain.errors import TieError, ValidationError


def test_envelope_shapes_stable():
    ok = success_envelope({"x": 1})
    assert set(ok.keys()) == {"ok", "data", "error", "meta"}
    assert ok["ok"] is True
    assert ok["error"] is None
    assert ok["meta"]["version"] == VERSION

    err = error_envelope(TieError("tie at 3", {"vertex": 3}))
    assert set(err.keys()) == {"ok", "data", "error", "meta"}
    assert err["ok"] is False
    assert err["data"] is None
    assert err["error"] == {"code": "tie", "message": "tie at 3", "details": {"vertex": 3}}


def test_meta_is_merged():
    env = success_envelope({}, meta={"command": "solve"})
    assert env["meta"] == {"version": VERSION, "command": "solve"}


def test_config_from_args():
    args = argparse.Namespace(command="tile", input="m.json", out="out", raster=256, tie_perturb=True)
    config = RunConfig.from_args(args)
    assert config.input_path == pathlib.Path("m.json")
    assert config.out_dir == pathlib.Path("out")
    assert config.raster == 256
    assert config.tie_perturb is True
    assert config.tol_rel == 1e-9


def test_config_echo_uses_wire_names():
    echo = RunConfig(command="solve", input_path=pathlib.Path("m.json")).echo()
    assert echo["input"] == "m.json"
    assert echo["tolRel"] == 1e-9
    assert echo["out"] is None


def test_input_is_required():
    with pytest.raises(ValidationError, match="--input"):
        RunConfig(command="solve")


def test_gen_needs_a_fixture():
    with pytest.raises(ValidationError, match="--fixture"):
        RunConfig(command="gen")


@pytest.mark.parametrize(
    "overrides",
    [{"raster": 10}, {"tol_rel": 0.0}, {"solve_tol": -1.0}, {"workers": 0}, {"svg_scale": 0.0}],
)
def test_bad_numbers(overrides):
    with pytest.raises(ValidationError):
        RunConfig(command="solve", input_path=pathlib.Path("m.json"), **overrides)


def test_unknown_command():
    with pytest.raises(ValidationError):
        RunConfig(command="draw", input_path=pathlib.Path("m.json"))
