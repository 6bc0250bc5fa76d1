"""CSV and JSON writers with byte-stable output.

Floats are written with ``repr`` so a rerun with the same inputs produces
identical files; JSON keys are sorted.
"""
from __future__ import annotations

import csv
import enum
import json
import math
from pathlib import Path

import numpy as np


def _plain(obj):
    """Convert numpy scalars/arrays, enums and tuples to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        # NaN and inf are not JSON; null keeps the document parseable
        return x if math.isfinite(x) else None
    return obj


def dumps(obj, indent=None) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=indent, allow_nan=False)


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj, indent=2) + "\n")
    return path


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def read_csv(path):
    """(header, rows) with numeric fields parsed as float where possible."""
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = []
        for row in r:
            out = []
            for v in row:
                try:
                    out.append(float(v))
                except ValueError:
                    out.append(v)
            rows.append(out)
    return header, rows
