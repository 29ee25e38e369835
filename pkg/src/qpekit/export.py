"""Deterministic CSV/JSON writers.

Floats are written with ``repr`` so reruns are byte-identical and values
round-trip exactly; JSON keys are sorted.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from pathlib import Path

import numpy as np


def plain(obj):
    """Convert numpy scalars/arrays and dataclasses to JSON-ready values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": plain(obj.real), "im": plain(obj.imag)}
    return obj


def dumps_json(obj) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: Path, obj) -> None:
    Path(path).write_text(dumps_json(obj), encoding="utf-8")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def dumps_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path: Path, header: list[str], rows) -> None:
    Path(path).write_text(dumps_csv(header, rows), encoding="utf-8")
