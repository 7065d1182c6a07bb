"""Run the stages behind the CLI commands.

solve -> consistency -> index -> singular values -> refine -> extract ->
gluing -> tile -> assemble -> doubling.  Components are tiled on a thread
pool when ``workers > 1``; everything else runs in order.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from domain.bvp import FluxReport, Potential, check_consistency, dirichlet_energy, green_identity_sides, solve_dn_bvp
from domain.complex import BoundarySpec, CellComplex
from domain.decomp import GluingEdge, Subdomain, check_energy_partition, extract_subdomains, singular_values, verify_gluing
from domain.errors import HarmtileError
from domain.morse import IndexReport, index_formula_check
from domain.refine import RefinedComplex, insert_level_vertices
from domain.tiler import DoublingReport, SurfaceNet, TiledComponent, assemble_surface, doubling_report, tile_component

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Settings:
    solve_tol: float = 1e-12
    tol_rel: float = 1e-9
    tie_perturb: bool = False
    raster: int = 1000
    workers: int = 1


@dataclass(eq=False)
class PipelineResult:
    cx: CellComplex
    spec: BoundarySpec
    potential: Potential
    flux: Optional[FluxReport] = None
    index: Optional[IndexReport] = None
    levels: List[float] = field(default_factory=list)
    refined: Optional[RefinedComplex] = None
    subdomains: List[Subdomain] = field(default_factory=list)
    gluing: List[GluingEdge] = field(default_factory=list)
    tiled: List[TiledComponent] = field(default_factory=list)
    surface: Optional[SurfaceNet] = None
    doubling: Optional[DoublingReport] = None

    @property
    def energy(self) -> float:
        return dirichlet_energy(self.cx, self.potential)

    def solution_dict(self) -> Dict[str, Any]:
        flux = self.flux
        return {
            "values": {str(v): x for v, x in self.potential.values.items()},
            "k": self.potential.k,
            "energy": self.energy,
            "residual": self.potential.residual_norm,
            "arcFlux": dict(flux.arc_totals) if flux else {},
            "consistencyTotal": flux.total if flux else None,
        }

    def decomposition_dict(self) -> Dict[str, Any]:
        return {
            "levels": list(self.levels),
            "typeIVertices": self.refined.type_i_count if self.refined else 0,
            "subdomains": [
                {
                    "index": sd.index,
                    "valueBand": list(sd.value_band),
                    "components": [c.as_dict() for c in sd.components],
                }
                for sd in self.subdomains
            ],
            "gluing": [edge.as_dict() for edge in self.gluing],
            "energyTotal": self.energy,
            "energyComponents": math.fsum(c.energy() for sd in self.subdomains for c in sd.components),
        }


def solve_stage(cx: CellComplex, spec: BoundarySpec, settings: Settings) -> PipelineResult:
    g = solve_dn_bvp(cx, spec, tol=settings.solve_tol)
    flux = check_consistency(cx, spec, g)
    return PipelineResult(cx=cx, spec=spec, potential=g, flux=flux)


def index_stage(result: PipelineResult, settings: Settings) -> PipelineResult:
    result.index = index_formula_check(
        result.cx, result.spec, result.potential, tol_rel=settings.tol_rel, tie_perturb=settings.tie_perturb
    )
    return result


def decompose_stage(result: PipelineResult, settings: Settings) -> PipelineResult:
    if result.index is None:
        index_stage(result, settings)
    result.levels = singular_values(result.index, result.potential, tol_rel=settings.tol_rel)
    rc = RefinedComplex.from_potential(result.cx, result.potential)
    result.subdomains = extract_subdomains(rc, result.spec, result.levels)
    for s in result.levels[1:-1]:
        rc = insert_level_vertices(rc, s)
    result.refined = rc
    check_energy_partition(result.subdomains, rc, tol_rel=settings.tol_rel)
    result.gluing = verify_gluing(result.subdomains, rc, tol_rel=settings.tol_rel)
    logger.info(
        "pipeline.decomposed levels=%d components=%d seams=%d",
        len(result.levels), sum(len(sd.components) for sd in result.subdomains), len(result.gluing),
    )
    return result


def tile_stage(result: PipelineResult, settings: Settings) -> PipelineResult:
    if not result.subdomains:
        decompose_stage(result, settings)
    comps = [c for sd in result.subdomains for c in sd.components]

    def work(comp):
        return tile_component(comp, raster=settings.raster, tol_rel=settings.tol_rel)

    if settings.workers > 1 and len(comps) > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            result.tiled = list(pool.map(work, comps))
    else:
        result.tiled = [work(c) for c in comps]

    result.surface = assemble_surface(result.tiled, result.gluing, result.index, tol_rel=settings.tol_rel)
    result.doubling = doubling_report(result.surface, len(result.cx.loops), result.energy)
    logger.info("pipeline.tiled components=%d area=%.12g", len(result.tiled), result.surface.area)
    return result


def run_pipeline(cx: CellComplex, spec: BoundarySpec, settings: Settings = Settings(), *, stop_after: str = "tile") -> PipelineResult:
    """Run every stage up to and including *stop_after* (``solve``, ``index``, ``decompose`` or ``tile``)."""
    stages: Sequence[Tuple[str, Callable[[PipelineResult, Settings], PipelineResult]]] = (
        ("index", index_stage),
        ("decompose", decompose_stage),
        ("tile", tile_stage),
    )
    result = solve_stage(cx, spec, settings)
    if stop_after == "solve":
        return result
    for name, stage in stages:
        result = stage(result, settings)
        if name == stop_after:
            break
    return result


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

CHECK_NAMES: Tuple[str, ...] = (
    "consistency",
    "green_identity",
    "index_identity",
    "gluing",
    "energy_area",
    "coverage",
    "doubling_gauss_bonnet",
)


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    value: Any = None
    exit_code: int = 0
    message: str = ""
    ran: bool = True

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "ok": self.ok,
            "ran": self.ran,
            "value": self.value,
            "exitCode": 0 if self.ok else self.exit_code,
            "message": self.message,
        }


def verify_all(cx: CellComplex, spec: BoundarySpec, settings: Settings = Settings()) -> List[Check]:
    """Every verification, reported as pass or fail, in ``CHECK_NAMES`` order.

    A failed stage is reported under the check it belongs to; the checks it
    would have fed are listed with ``ran=False``.
    """
    checks: List[Check] = []

    def failed(name: str, exc: HarmtileError) -> List[Check]:
        logger.warning("pipeline.check_failed name=%s code=%s", name, exc.code)
        checks.append(Check(name=name, ok=False, value=exc.details, exit_code=exc.exit_code, message=exc.message))
        done = {c.name for c in checks}
        checks.extend(Check(name=n, ok=False, message="not run", ran=False) for n in CHECK_NAMES if n not in done)
        return sorted(checks, key=lambda c: CHECK_NAMES.index(c.name))

    try:
        result = solve_stage(cx, spec, settings)
    except HarmtileError as exc:
        return failed("consistency", exc)
    checks.append(Check(name="consistency", ok=True, value=result.flux.total))

    interior = [v for v in cx.vertex_ids if not cx.is_boundary(v)]
    xs = {v: p[0] for v, p in cx.coords.items()}
    lhs, rhs = green_identity_sides(cx, interior or cx.vertex_ids, result.potential, xs)
    residual = abs(lhs - rhs)
    ok = residual <= 1e-10 * max(abs(lhs), abs(rhs), 1.0)
    checks.append(Check(name="green_identity", ok=ok, value=residual, exit_code=3))

    stage = "index_identity"
    try:
        index_stage(result, settings)
        checks.append(Check(name=stage, ok=True, value=str(result.index.total)))
        stage = "gluing"
        decompose_stage(result, settings)
        checks.append(Check(name=stage, ok=True, value=len(result.gluing)))
        stage = "coverage"
        tile_stage(result, settings)
    except HarmtileError as exc:
        return failed(stage, exc)

    area = result.surface.area
    energy = result.energy
    checks.append(
        Check(name="energy_area", ok=abs(area - energy) <= settings.tol_rel * max(energy, 1e-300), value={"area": area, "energy": energy}, exit_code=5)
    )
    checks.append(Check(name="coverage", ok=all(tc.coverage.ok for tc in result.tiled), value=len(result.tiled), exit_code=5))
    checks.append(
        Check(
            name="doubling_gauss_bonnet",
            ok=result.doubling.balanced,
            value={"curvaturePi": str(result.doubling.curvature), "eulerTermPi": str(result.doubling.euler_term)},
            exit_code=5,
        )
    )
    return checks
