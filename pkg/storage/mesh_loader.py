"""Read and write harmtile mesh documents.

Document layout::

    {
      "vertices": [{"id": 0, "x": 0.0, "y": 0.0}, ...],
      "edges":    [{"u": 0, "v": 1, "c": 1.0}, ...],
      "cells":    [[0, 1, 2], ...],
      "boundary": {"loops": [[...], ...], "alphaArcs": [[...]],
                   "betaArcs": [[...]], "groundArcs": [[...]], "k": 1.0}
    }

Numbers may be JSON numbers or exact rationals written as ``"p/q"``
strings.  ``groundArcs`` is optional.
"""

from __future__ import annotations

import json
import logging
import math
import pathlib
from fractions import Fraction
from typing import Any, Dict, List, Tuple, Union

from domain.complex import BoundarySpec, CellComplex, VertexId
from domain.errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

_REQUIRED_KEYS: frozenset = frozenset({"vertices", "edges", "cells", "boundary"})
_REQUIRED_BOUNDARY_KEYS: frozenset = frozenset({"loops", "alphaArcs", "k"})


def parse_number(value: Any, what: str) -> float:
    """Accept a JSON number or a ``"p/q"`` rational string."""
    if isinstance(value, bool):
        raise ValidationError(f"{what} must be a number, got a boolean")
    if isinstance(value, (int, float)):
        result = float(value)
    elif isinstance(value, str):
        try:
            result = float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"{what} is not a number or p/q rational: {value!r}") from None
    else:
        raise ValidationError(f"{what} must be a number, got {type(value).__name__}")
    if not math.isfinite(result):
        raise ValidationError(f"{what} must be finite, got {value!r}")
    return result


def _vertex_id(value: Any, what: str) -> VertexId:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ValidationError(f"{what} must be an integer or string id, got {value!r}")
    return value


def _id_lists(value: Any, what: str) -> List[Tuple[VertexId, ...]]:
    if not isinstance(value, list):
        raise ValidationError(f"{what} must be a JSON array of id arrays")
    out = []
    for i, item in enumerate(value):
        if not isinstance(item, list):
            raise ValidationError(f"{what}[{i}] must be a JSON array of ids")
        out.append(tuple(_vertex_id(v, f"{what}[{i}] entry") for v in item))
    return out


def complex_from_document(doc: Any) -> Tuple[CellComplex, BoundarySpec]:
    """Validate a parsed document and build the complex and boundary spec."""
    if not isinstance(doc, dict):
        raise ValidationError("mesh document must be a JSON object")
    missing = _REQUIRED_KEYS - doc.keys()
    if missing:
        raise ValidationError(f"mesh document is missing keys: {', '.join(sorted(missing))}")

    vertices = []
    for i, entry in enumerate(doc["vertices"] if isinstance(doc["vertices"], list) else []):
        if not isinstance(entry, dict) or not {"id", "x", "y"} <= entry.keys():
            raise ValidationError(f"vertices[{i}] must be an object with id, x and y")
        vid = _vertex_id(entry["id"], f"vertices[{i}].id")
        vertices.append((vid, parse_number(entry["x"], f"vertex {vid!r} x"), parse_number(entry["y"], f"vertex {vid!r} y")))
    if not vertices:
        raise ValidationError("vertices must be a non-empty JSON array")

    edges = []
    for i, entry in enumerate(doc["edges"] if isinstance(doc["edges"], list) else []):
        if not isinstance(entry, dict) or not {"u", "v", "c"} <= entry.keys():
            raise ValidationError(f"edges[{i}] must be an object with u, v and c")
        u = _vertex_id(entry["u"], f"edges[{i}].u")
        v = _vertex_id(entry["v"], f"edges[{i}].v")
        edges.append((u, v, parse_number(entry["c"], f"edge ({u!r}, {v!r}) conductance")))

    cells = _id_lists(doc["cells"], "cells")

    boundary = doc["boundary"]
    if not isinstance(boundary, dict):
        raise ValidationError("boundary must be a JSON object")
    missing = _REQUIRED_BOUNDARY_KEYS - boundary.keys()
    if missing:
        raise ValidationError(f"boundary is missing keys: {', '.join(sorted(missing))}")

    cx = CellComplex.build(vertices, edges, cells, _id_lists(boundary["loops"], "boundary.loops"))
    spec = BoundarySpec.build(
        cx,
        parse_number(boundary["k"], "boundary.k"),
        _id_lists(boundary["alphaArcs"], "boundary.alphaArcs"),
        _id_lists(boundary.get("betaArcs", []), "boundary.betaArcs"),
        _id_lists(boundary.get("groundArcs", []), "boundary.groundArcs"),
    )
    logger.info(
        "mesh.loaded vertices=%d edges=%d cells=%d loops=%d",
        len(cx.coords), len(cx.conductances), len(cx.cells), len(cx.loops),
    )
    return cx, spec


def parse_document(text: str) -> Dict[str, Any]:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"mesh document contains invalid JSON: {exc}") from exc


def load_complex(source: Union[str, pathlib.Path, Dict[str, Any]]) -> Tuple[CellComplex, BoundarySpec]:
    """Load a mesh document from a path, a JSON string, or a parsed dict.

    Parameters
    ----------
    source:
        A ``pathlib.Path``, a JSON text, or an already parsed document.

    Raises
    ------
    ParseError
        If the file is missing or the JSON is malformed.
    ValidationError
        If the document violates a complex or boundary invariant.
    """
    if isinstance(source, dict):
        return complex_from_document(source)
    if isinstance(source, pathlib.Path):
        try:
            text = source.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ParseError(f"mesh document not found: {source}") from None
        return complex_from_document(parse_document(text))
    return complex_from_document(parse_document(source))


def dump_complex(cx: CellComplex, spec: BoundarySpec) -> Dict[str, Any]:
    """Inverse of :func:`load_complex`."""
    boundary: Dict[str, Any] = {
        "loops": [list(loop) for loop in cx.loops],
        "alphaArcs": [list(arc) for arc in spec.alpha_arcs],
        "betaArcs": [list(arc) for arc in spec.beta_arcs],
        "k": spec.k,
    }
    if spec.ground_arcs:
        boundary["groundArcs"] = [list(arc) for arc in spec.ground_arcs]
    return {
        "vertices": [{"id": v, "x": x, "y": y} for v, (x, y) in cx.coords.items()],
        "edges": [{"u": u, "v": v, "c": c} for (u, v), c in cx.conductances.items()],
        "cells": [list(cell) for cell in cx.cells],
        "boundary": boundary,
    }
