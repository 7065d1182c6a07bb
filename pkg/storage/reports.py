"""Write command outputs: JSON envelopes and per-component SVG files.

Floats are written with Python's shortest round-trip ``repr``; non-finite
values and exact ``Fraction`` values are turned into strings first.
"""

from __future__ import annotations

import json
import logging
import math
import os
import pathlib
from fractions import Fraction
from typing import Any, Union

logger = logging.getLogger(__name__)

PathLike = Union[str, pathlib.Path]


def json_safe(value: Any) -> Any:
    """Recursively convert *value* to types ``json.dumps`` writes losslessly."""
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if hasattr(value, "item") and callable(value.item):
        return json_safe(value.item())
    return value


def dumps(payload: Any) -> str:
    return json.dumps(json_safe(payload), indent=2, sort_keys=False, allow_nan=False)


def _write_atomic(path: pathlib.Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_json(path: PathLike, payload: Any) -> pathlib.Path:
    path = pathlib.Path(path)
    _write_atomic(path, dumps(payload) + "\n")
    logger.info("reports.written path=%s", path)
    return path


def write_svg(path: PathLike, svg: str) -> pathlib.Path:
    path = pathlib.Path(path)
    _write_atomic(path, svg)
    logger.info("reports.written path=%s", path)
    return path


def read_json(path: PathLike) -> Any:
    return json.loads(pathlib.Path(path).read_text(encoding="utf-8"))
