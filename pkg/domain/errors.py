"""Typed failures raised by the harmtile library.

Every error carries a stable ``code`` (used in JSON error envelopes) and the
process ``exit_code`` the CLI maps it to:

* 2 -- input / validation problems
* 3 -- solver problems
* 4 -- index and level-structure problems
* 5 -- tiling and gluing problems
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict


@dataclass(eq=False)
class HarmtileError(Exception):
    message: str
    details: Dict[str, Any] = field(default_factory=dict)

    code: ClassVar[str] = "harmtile_error"
    exit_code: ClassVar[int] = 1

    def __str__(self) -> str:
        return self.message

    def as_dict(self) -> Dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": dict(self.details)}


# -- Input / validation (exit 2) --------------------------------------------

class ParseError(HarmtileError):
    code = "parse_error"
    exit_code = 2


class ValidationError(HarmtileError):
    code = "validation_error"
    exit_code = 2


class UnknownVertex(HarmtileError):
    code = "unknown_vertex"
    exit_code = 2


class MissingValue(HarmtileError):
    code = "missing_value"
    exit_code = 2


class BadSubset(HarmtileError):
    code = "bad_subset"
    exit_code = 2


class NotBoundary(HarmtileError):
    code = "not_boundary"
    exit_code = 2


class OutsideComplex(HarmtileError):
    code = "outside_complex"
    exit_code = 2


class UnknownFixture(HarmtileError):
    code = "unknown_fixture"
    exit_code = 2


# -- Solver (exit 3) ----------------------------------------------------------

class SingularSystem(HarmtileError):
    code = "singular_system"
    exit_code = 3


class SolverDivergence(HarmtileError):
    code = "solver_divergence"
    exit_code = 3


class ConsistencyViolation(HarmtileError):
    code = "consistency_violation"
    exit_code = 3


# -- Index / level structure (exit 4) -----------------------------------------

class TieError(HarmtileError):
    code = "tie"
    exit_code = 4


class IndexMismatch(HarmtileError):
    code = "index_mismatch"
    exit_code = 4


class DegenerateLevel(HarmtileError):
    code = "degenerate_level"
    exit_code = 4


class SideUndefined(HarmtileError):
    code = "side_undefined"
    exit_code = 4


# -- Tiling / gluing (exit 5) -------------------------------------------------

class UnclassifiableComponent(HarmtileError):
    code = "unclassifiable_component"
    exit_code = 5


class GluingMismatch(HarmtileError):
    code = "gluing_mismatch"
    exit_code = 5


class CoverageGap(HarmtileError):
    code = "coverage_gap"
    exit_code = 5


class OverlapDetected(HarmtileError):
    code = "overlap_detected"
    exit_code = 5
