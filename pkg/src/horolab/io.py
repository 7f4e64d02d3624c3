"""Deterministic JSON and CSV output, plus the distance batch format."""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .metric import MetricBackend

DISTANCE_IN = ("z_re", "z_im", "w_re", "w_im")
DISTANCE_OUT = ("value", "error")


def plain(obj):
    """Convert numpy scalars/arrays and complex numbers into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [plain(obj.real), plain(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    return obj


def dumps(obj) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def _cell(v):
    v = plain(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return json.dumps(v)
    return v


def csv_text(rows, columns=None) -> str:
    rows = list(rows)
    if columns is None:
        columns = []
        for r in rows:
            columns.extend(k for k in r if k not in columns)
    buf = _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(r.get(k, "")) for k in columns})
    return buf.getvalue()


def write_csv(path, rows, columns=None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(rows, columns))
    return path


def read_distance_batch(path) -> tuple[np.ndarray, np.ndarray]:
    """Planar point pairs from a CSV with columns ``z_re, z_im, w_re, w_im``."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(DISTANCE_IN) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"distance batch is missing columns {sorted(missing)}")
        rows = [[float(r[c]) for c in DISTANCE_IN] for r in reader]
    a = np.array(rows, float).reshape(-1, 4)
    return a[:, 0] + 1j * a[:, 1], a[:, 2] + 1j * a[:, 3]


def distance_batch_rows(backend: MetricBackend, Z, W) -> list[dict]:
    backend.check_interior(Z, W)
    v, e = backend.values(np.asarray(Z)[:, None], np.asarray(W)[:, None])
    return [{"value": float(a), "error": float(b)} for a, b in zip(v, e)]
