"""Run configuration and the stable JSON envelopes printed by every command."""

from __future__ import annotations

import argparse
import pathlib
from dataclasses import dataclass
from typing import Any, Dict, Optional

from domain.errors import HarmtileError, ValidationError

VERSION = "0.1.0"

COMMANDS = ("solve", "index", "decompose", "tile", "verify", "gen")
MIN_RASTER = 64


def success_envelope(data: Dict[str, Any], *, version: str = VERSION, meta: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"ok": True, "data": data, "error": None, "meta": {"version": version}}
    if meta:
        payload["meta"].update(meta)
    return payload


def error_envelope(exc: HarmtileError, *, version: str = VERSION, meta: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"ok": False, "data": None, "error": exc.as_dict(), "meta": {"version": version}}
    if meta:
        payload["meta"].update(meta)
    return payload


@dataclass
class RunConfig:
    command: str
    input_path: Optional[pathlib.Path] = None
    out_dir: Optional[pathlib.Path] = None
    solve_tol: float = 1e-12
    tol_rel: float = 1e-9
    tie_perturb: bool = False
    raster: int = 1000
    svg_scale: float = 400.0
    workers: int = 1
    fixture: Optional[str] = None
    seed: Optional[int] = None
    topology: Optional[str] = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}; expected one of {list(COMMANDS)}")
        for name in ("solve_tol", "tol_rel", "svg_scale"):
            value = getattr(self, name)
            if not value > 0:
                raise ValidationError(f"{name} must be positive, got {value!r}", {"field": name})
        if self.raster < MIN_RASTER:
            raise ValidationError(f"raster must be at least {MIN_RASTER}, got {self.raster!r}", {"field": "raster"})
        if self.workers < 1:
            raise ValidationError(f"workers must be at least 1, got {self.workers!r}", {"field": "workers"})
        if self.command == "gen":
            if not self.fixture:
                raise ValidationError("gen needs --fixture", {"field": "fixture"})
        elif self.input_path is None:
            raise ValidationError(f"{self.command} needs --input", {"field": "input"})

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            command=args.command,
            input_path=pathlib.Path(args.input) if getattr(args, "input", None) else None,
            out_dir=pathlib.Path(args.out) if getattr(args, "out", None) else None,
            solve_tol=getattr(args, "solve_tol", 1e-12),
            tol_rel=getattr(args, "tol_rel", 1e-9),
            tie_perturb=bool(getattr(args, "tie_perturb", False)),
            raster=getattr(args, "raster", 1000),
            svg_scale=getattr(args, "svg_scale", 400.0),
            workers=getattr(args, "workers", 1),
            fixture=getattr(args, "fixture", None),
            seed=getattr(args, "seed", None),
            topology=getattr(args, "topology", None),
        )

    def echo(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "input": str(self.input_path) if self.input_path else None,
            "out": str(self.out_dir) if self.out_dir else None,
            "solveTol": self.solve_tol,
            "tolRel": self.tol_rel,
            "tiePerturb": self.tie_perturb,
            "raster": self.raster,
            "svgScale": self.svg_scale,
            "workers": self.workers,
            "fixture": self.fixture,
            "seed": self.seed,
            "topology": self.topology,
        }
