"""Readers for the rabispec output files, with strict schema validation.

This package never recomputes physics: everything plotted, including the
analytic baseline parabolas, comes out of these files.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path


class SchemaError(ValueError):
    """An input file does not match its documented schema."""


SWEEP_COLUMNS = ["g", "N", "x", "E", "on_baseline"]
BASELINE_COLUMNS = ["g", "N", "E_plus", "E_minus"]
CONTOUR_COLUMNS = ["baseline_N", "branch", "polyline_id", "vertex_index",
                   "delta", "g", "closed_flag"]


def _read_csv(path, required):
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input file missing: {path}")
    meta = {}
    body = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val
            else:
                body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = rows[0]
    if header[:len(required)] != required:
        raise SchemaError(f"{path}: header {header!r} does not start with "
                          f"expected columns {required!r}")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise SchemaError(f"{path}:{lineno}: expected {len(header)} "
                              f"fields, got {len(row)}")
        out.append(dict(zip(header, row)))
    return meta, out


def read_sweep(path):
    """Long-format level table: list of dicts with floats g, x, E, int N."""
    meta, rows = _read_csv(path, SWEEP_COLUMNS)
    try:
        for r in rows:
            r["g"] = float(r["g"])
            r["N"] = int(r["N"])
            r["x"] = float(r["x"])
            r["E"] = float(r["E"])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric field ({exc})")
    return meta, rows


def read_baselines(path):
    """Analytic baseline table rows with floats g, E_plus, E_minus, int N."""
    meta, rows = _read_csv(path, BASELINE_COLUMNS)
    try:
        for r in rows:
            r["g"] = float(r["g"])
            r["N"] = int(r["N"])
            r["E_plus"] = float(r["E_plus"])
            r["E_minus"] = float(r["E_minus"])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric field ({exc})")
    return meta, rows


def read_contours(path):
    """Contour vertices grouped into polylines.

    Returns (meta, branch, polylines) where polylines is a list of
    (closed_flag, [(delta, g), ...]) in polyline order.
    """
    meta, rows = _read_csv(path, CONTOUR_COLUMNS)
    branch = rows[0]["branch"] if rows else "plus"
    groups = {}
    closed = {}
    try:
        for r in rows:
            pid = int(r["polyline_id"])
            groups.setdefault(pid, []).append(
                (int(r["vertex_index"]), float(r["delta"]), float(r["g"])))
            closed[pid] = r["closed_flag"] == "1"
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric field ({exc})")
    polylines = []
    for pid in sorted(groups):
        pts = sorted(groups[pid])
        polylines.append((closed[pid], [(d, g) for _, d, g in pts]))
    return meta, branch, polylines


def read_exceptional(path):
    """Exceptional-point records from the JSON emitter."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input file missing: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})")
    if not isinstance(doc, dict) or "points" not in doc:
        raise SchemaError(f"{path}: expected an object with a 'points' list")
    required = {"N", "branch", "delta", "g", "x_p", "energy", "class",
                "constraint_value"}
    for i, rec in enumerate(doc["points"]):
        missing = required - set(rec)
        if missing:
            raise SchemaError(f"{path}: point {i} missing fields {missing}")
        if rec["branch"] not in ("plus", "minus"):
            raise SchemaError(f"{path}: point {i} has bad branch "
                              f"{rec['branch']!r}")
    return doc
