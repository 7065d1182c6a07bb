"""
harmtile
--------

Command-line driver for harmonic rectangle tilings of planar cell complexes.
Solves the mixed Dirichlet-Neumann problem on a conductance-weighted mesh,
checks the boundary index identity, cuts the region at its singular levels,
and tiles every piece with rectangles whose areas add up to the energy.

Commands:
* ``solve``      -- potential, energy and arc fluxes
* ``index``      -- sign-change indices and the index identity
* ``decompose``  -- components, their kinds and the gluing seams
* ``tile``       -- tilings, coverage reports, cones and SVG per component
* ``verify``     -- every check at once, pass/fail
* ``gen``        -- write a fixture mesh document

Each command prints a JSON envelope and, with ``--out``, also writes it to
``<out>/<command>.json``.  Log level comes from ``HARMTILE_LOG``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Tuple

from cli.schemas import COMMANDS, RunConfig, error_envelope, success_envelope
from cli.svg import render_component
from domain.errors import HarmtileError
from services.pipeline import Settings, run_pipeline, verify_all
from storage.fixtures import NAMED_FIXTURES, TOPOLOGIES, gen_fixture
from storage.mesh_loader import load_complex
from storage.reports import dumps, write_json, write_svg

logger = logging.getLogger("harmtile")


def _configure_logging() -> None:
    """Level from ``HARMTILE_LOG`` (a level name), ``WARNING`` by default."""
    name = os.environ.get("HARMTILE_LOG", "WARNING").strip().upper()
    level = logging.getLevelName(name)
    unknown = not isinstance(level, int)
    logging.basicConfig(
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        datefmt="%Y-%m-%dT%H:%M:%S",
        level=logging.INFO if unknown else level,
        stream=sys.stderr,
    )
    if unknown:
        logger.warning("harmtile.log_level_unknown value=%s", name)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="harmtile", description="Harmonic rectangle tilings of planar cell complexes.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", help="mesh document (JSON)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--tie-perturb", action="store_true", help="break value ties by vertex id")
    parser.add_argument("--tol-rel", type=float, default=1e-9)
    parser.add_argument("--solve-tol", type=float, default=1e-12)
    parser.add_argument("--raster", type=int, default=1000)
    parser.add_argument("--svg-scale", type=float, default=400.0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--fixture", help=f"one of {', '.join(NAMED_FIXTURES)} or random")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--topology", choices=TOPOLOGIES)
    return parser


def _settings(config: RunConfig) -> Settings:
    return Settings(
        solve_tol=config.solve_tol,
        tol_rel=config.tol_rel,
        tie_perturb=config.tie_perturb,
        raster=config.raster,
        workers=config.workers,
    )


def cmd_solve(config: RunConfig) -> Dict[str, Any]:
    cx, spec = load_complex(config.input_path)
    return run_pipeline(cx, spec, _settings(config), stop_after="solve").solution_dict()


def cmd_index(config: RunConfig) -> Dict[str, Any]:
    cx, spec = load_complex(config.input_path)
    result = run_pipeline(cx, spec, _settings(config), stop_after="index")
    return {"energy": result.energy, **result.index.as_dict()}


def cmd_decompose(config: RunConfig) -> Dict[str, Any]:
    cx, spec = load_complex(config.input_path)
    return run_pipeline(cx, spec, _settings(config), stop_after="decompose").decomposition_dict()


def cmd_tile(config: RunConfig) -> Dict[str, Any]:
    cx, spec = load_complex(config.input_path)
    result = run_pipeline(cx, spec, _settings(config), stop_after="tile")
    svgs: List[str] = []
    if config.out_dir is not None:
        for tc in result.tiled:
            path = config.out_dir / f"component-{tc.component.index}.svg"
            write_svg(path, render_component(tc, scale=config.svg_scale))
            svgs.append(str(path))
    energy = result.energy
    area = result.surface.area
    return {
        "surface": result.surface.as_dict(),
        "doubling": result.doubling.as_dict(),
        "summary": {
            "components": len(result.tiled),
            "energy": energy,
            "area": area,
            "areaEqualsEnergy": abs(area - energy) <= config.tol_rel * max(energy, 1e-300),
            "coverage": all(tc.coverage.ok for tc in result.tiled),
        },
        "svg": svgs,
    }


def cmd_verify(config: RunConfig) -> Dict[str, Any]:
    cx, spec = load_complex(config.input_path)
    checks = verify_all(cx, spec, _settings(config))
    return {"ok": all(c.ok for c in checks), "checks": [c.as_dict() for c in checks]}


def cmd_gen(config: RunConfig) -> Dict[str, Any]:
    doc = gen_fixture(config.fixture, seed=config.seed, topology=config.topology)
    data: Dict[str, Any] = {"fixture": config.fixture, "document": doc}
    if config.out_dir is not None:
        name = config.fixture if config.fixture != "random" else f"random-{config.topology}-{config.seed}"
        data["path"] = str(write_json(config.out_dir / f"{name}.json", doc))
    return data


_HANDLERS = {
    "solve": cmd_solve,
    "index": cmd_index,
    "decompose": cmd_decompose,
    "tile": cmd_tile,
    "verify": cmd_verify,
    "gen": cmd_gen,
}


def run(argv: Optional[List[str]] = None) -> Tuple[Dict[str, Any], int]:
    """Parse *argv*, run the command, and return ``(envelope, exit_code)``."""
    args = build_parser().parse_args(argv)
    config: Optional[RunConfig] = None
    try:
        config = RunConfig.from_args(args)
        data = _HANDLERS[config.command](config)
    except HarmtileError as exc:
        logger.warning("harmtile.failed command=%s code=%s", args.command, exc.code)
        meta = {"command": args.command, "config": config.echo()} if config else {"command": args.command}
        return error_envelope(exc, meta=meta), exc.exit_code

    exit_code = 0
    if config.command == "verify" and not data["ok"]:
        exit_code = next(c["exitCode"] for c in data["checks"] if not c["ok"])
    envelope = success_envelope(data, meta={"command": config.command, "config": config.echo()})
    if config.out_dir is not None:
        write_json(config.out_dir / f"{config.command}.json", envelope)
    return envelope, exit_code


def main(argv: Optional[List[str]] = None) -> int:
    _configure_logging()
    envelope, exit_code = run(argv)
    sys.stdout.write(dumps(envelope) + "\n")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
