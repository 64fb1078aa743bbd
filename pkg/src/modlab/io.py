"""Deterministic CSV and manifest output.

CSV cells carry 17 significant digits so float64 values round-trip exactly;
column order is fixed by the caller and identical configs produce identical
bytes.  The run manifest echoes the configuration, a content hash of its
canonical JSON form, package versions and wall-clock timings.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
import sys
from pathlib import Path
from typing import Mapping, Sequence


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def emit_csv(rows: Sequence[Mapping], path, columns: Sequence[str]) -> None:
    """Write ``rows`` (mappings) with the given column order."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(row[c]) for c in columns])
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def read_csv(path) -> list[dict[str, float]]:
    """Read back a CSV written by :func:`emit_csv`; cells parsed as floats
    where possible."""
    out: list[dict] = []
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                parsed = {}
                for key, val in row.items():
                    try:
                        parsed[key] = float(val)
                    except (TypeError, ValueError):
                        parsed[key] = val
                out.append(parsed)
    except OSError as exc:
        raise OSError(f"reading {path}: {exc}") from exc
    return out


def config_hash(config: Mapping) -> str:
    """sha256 of the canonical JSON form of a configuration mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"),
                      default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def emit_manifest(config: Mapping, path, timings: Mapping[str, float] | None = None,
                  extra: Mapping | None = None) -> dict:
    """Write the run manifest JSON; returns the manifest dict."""
    import numpy
    import scipy

    from . import __version__

    manifest = {
        "config": dict(config),
        "config_sha256": config_hash(config),
        "versions": {
            "modlab": __version__,
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
            "platform": platform.system(),
        },
        "timings_seconds": dict(timings or {}),
    }
    if extra:
        manifest.update(extra)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc
    return manifest
