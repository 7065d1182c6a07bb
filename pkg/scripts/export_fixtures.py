#!/usr/bin/env python3
"""Regenerate every named fixture document into a directory.

Usage:
    # Write all fixtures to ./fixtures
    python scripts/export_fixtures.py

    # Choose the directory and a subset
    python scripts/export_fixtures.py --out data/meshes FIX-QUAD FIX-ANN

    # Show what would be written
    python scripts/export_fixtures.py --dry-run
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Allow running from the project root or from the scripts/ dir
_HERE = Path(__file__).resolve().parent
_ROOT = _HERE.parent
sys.path.insert(0, str(_ROOT))

from domain.errors import HarmtileError  # noqa: E402
from storage.fixtures import NAMED_FIXTURES, gen_fixture  # noqa: E402
from storage.reports import write_json  # noqa: E402

logger = logging.getLogger("export_fixtures")


def export(out_dir: Path, names: Optional[List[str]] = None, *, dry_run: bool = False) -> List[Path]:
    written: List[Path] = []
    for name in names or NAMED_FIXTURES:
        path = out_dir / f"{name}.json"
        if dry_run:
            logger.info("would write %s", path)
        else:
            doc = gen_fixture(name)
            write_json(path, doc)
            logger.info("wrote %s (%d vertices)", path, len(doc["vertices"]))
        written.append(path)
    return written


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s  %(levelname)-8s  %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stdout,
    )
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("names", nargs="*", help="fixture names (default: all)")
    parser.add_argument("--out", default="fixtures")
    parser.add_argument("--dry-run", action="store_true")
    args = parser.parse_args(argv)
    try:
        export(Path(args.out), args.names, dry_run=args.dry_run)
    except HarmtileError as exc:
        logger.error("export failed: %s", exc)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
