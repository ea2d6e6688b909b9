"""Constraint curves in the (delta, g) parameter plane.

For a fixed baseline, the zero level set of the regularized function at
x_p sweeps out every exceptional curve; the zero set of the constraint
value K_N picks out the S1 subset.  Grids store (sign, log magnitude)
cells since magnitudes span hundreds of orders across the plane; the
tracer works off the sign field with crossings positioned by inverse
linear interpolation, computed from log magnitudes as a logistic so huge
ratios neither overflow nor lose the crossing.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptional import _constraint_grid
from .gfunction import _baseline_core, LOG_TINY
from .model import Baseline, ModelParams, Truncation


@dataclass
class PlaneGrid:
    """Sampled field over a (delta, g) rectangle for one baseline.

    values are (sign, log magnitude) matrices indexed [i_g, j_delta];
    converged flags evaluation health per cell.  field_kind is "greg"
    (regularized function at x_p) or "constraint" (K_N at x_p).
    """

    baseline: Baseline
    delta_axis: np.ndarray
    g_axis: np.ndarray
    sign: np.ndarray
    log_mag: np.ndarray
    converged: np.ndarray
    field_kind: str
    omega: float
    epsilon: float

    def real_values(self) -> np.ndarray:
        """Plain float matrix (overflows to inf where the log demands it)."""
        with np.errstate(over="ignore"):
            return self.sign * np.exp(self.log_mag)

    def flagged_fraction(self) -> float:
        return float(np.mean(~self.converged))


@dataclass
class ContourSet:
    """Zero-level polylines extracted from one PlaneGrid."""

    baseline: Baseline
    kind: str                       # "S1" | "S2_or_all"
    polylines: list[np.ndarray]     # each (n, 2): columns delta, g
    closed: list[bool]
    ambiguous_saddles: int = 0
    gap_cells: int = 0


def sample_plane(b: Baseline, delta_range: tuple[float, float],
                 g_range: tuple[float, float], resolution,
                 p_base: ModelParams, t: Truncation = Truncation(),
                 field_kind: str = "greg") -> PlaneGrid:
    """Sample the baseline field on a uniform (delta, g) grid.

    g_range must be strictly positive (the series is undefined at g = 0).
    resolution is (n_delta, n_g) or a single int for both.
    """
    if g_range[0] <= 0:
        raise ValueError(f"g_range must be strictly positive, got {g_range}")
    if field_kind not in ("greg", "constraint"):
        raise ValueError(f"unknown field_kind {field_kind!r}")
    n_d, n_g = (resolution, resolution) if isinstance(resolution, int) else resolution
    dl = np.linspace(delta_range[0], delta_range[1], n_d)
    gl = np.linspace(g_range[0], g_range[1], n_g)
    DD, GG = np.meshgrid(dl, gl)
    p0 = p_base
    p0.check_nonresonant()
    if field_kind == "constraint":
        vals = _constraint_grid(b, p0, g=GG, delta=DD)
        zero = vals == 0.0
        sign = np.where(zero, 0, np.sign(vals)).astype(np.int8)
        logm = np.where(zero, LOG_TINY,
                        np.log(np.abs(np.where(zero, 1.0, vals))))
        conv = np.isfinite(vals)
    else:
        res = _baseline_core(b, p0, t, g=GG, delta=DD)
        sign = res["sign"]
        logm = res["logmag"]
        conv = res["converged"] & np.isfinite(np.where(sign == 0, 0.0, logm))
    return PlaneGrid(b, dl, gl, sign, logm, conv, field_kind,
                     p0.omega, p0.epsilon)


def _crossing(la: float, lb: float) -> float:
    """Fraction along an edge where a sign-changing field crosses zero.

    Equals |va| / (|va| + |vb|) evaluated from log magnitudes, which is the
    inverse linear interpolation of the actual values.
    """
    return 1.0 / (1.0 + math.exp(min(max(lb - la, -500.0), 500.0)))


def trace_contours(grid: PlaneGrid, max_flagged: float = 0.05) -> ContourSet:
    """March the zero level set of the sampled sign field into polylines.

    Cells touching flagged samples are never traced through (gaps are
    counted); saddle cells are resolved by the sign of the dominant-corner
    estimate of the center value and counted as ambiguous.
    """
    if grid.flagged_fraction() > max_flagged:
        raise ValueError(
            f"{grid.flagged_fraction():.1%} of cells are flagged "
            f"(limit {max_flagged:.0%}); refusing to trace")
    dl, gl = grid.delta_axis, grid.g_axis
    S, L = grid.sign, grid.log_mag
    ok = grid.converged
    n_g, n_d = S.shape

    def edge_point(kind, i, j):
        if kind == "h":
            f = _crossing(L[i, j], L[i, j + 1])
            return (dl[j] + f * (dl[j + 1] - dl[j]), gl[i])
        f = _crossing(L[i, j], L[i + 1, j])
        return (dl[j], gl[i] + f * (gl[i + 1] - gl[i]))

    # cell corner order: 0=(i,j) 1=(i,j+1) 2=(i+1,j+1) 3=(i+1,j)
    # edges: bottom ("h",i,j), right ("v",i,j+1), top ("h",i+1,j), left ("v",i,j)
    LOOKUP = {
        1: [("h", 0, 0), ("v", 0, 0)], 2: [("h", 0, 0), ("v", 0, 1)],
        4: [("v", 0, 1), ("h", 1, 0)], 8: [("v", 0, 0), ("h", 1, 0)],
        3: [("v", 0, 0), ("v", 0, 1)], 6: [("h", 0, 0), ("h", 1, 0)],
        12: [("v", 0, 0), ("v", 0, 1)], 9: [("h", 0, 0), ("h", 1, 0)],
        14: [("h", 0, 0), ("v", 0, 0)], 13: [("h", 0, 0), ("v", 0, 1)],
        11: [("v", 0, 1), ("h", 1, 0)], 7: [("v", 0, 0), ("h", 1, 0)],
    }

    segments = {}
    ambiguous = 0
    gaps = 0
    for i in range(n_g - 1):
        for j in range(n_d - 1):
            s = (int(S[i, j] > 0) | (int(S[i, j + 1] > 0) << 1)
                 | (int(S[i + 1, j + 1] > 0) << 2) | (int(S[i + 1, j] > 0) << 3))
            if s in (0, 15):
                continue
            if not (ok[i, j] and ok[i, j + 1] and ok[i + 1, j + 1] and ok[i + 1, j]):
                gaps += 1
                continue
            if s in (5, 10):
                ambiguous += 1
                lmax = max(L[i, j], L[i, j + 1], L[i + 1, j + 1], L[i + 1, j])
                center = sum(int(sg) * math.exp(lg - lmax) for sg, lg in
                             ((S[i, j], L[i, j]), (S[i, j + 1], L[i, j + 1]),
                              (S[i + 1, j + 1], L[i + 1, j + 1]),
                              (S[i + 1, j], L[i + 1, j])))
                pos_center = center > 0
                if s == 5:
                    pairs = ([[("h", 0, 0), ("v", 0, 1)], [("v", 0, 0), ("h", 1, 0)]]
                             if pos_center else
                             [[("h", 0, 0), ("v", 0, 0)], [("v", 0, 1), ("h", 1, 0)]])
                else:
                    pairs = ([[("h", 0, 0), ("v", 0, 0)], [("v", 0, 1), ("h", 1, 0)]]
                             if pos_center else
                             [[("h", 0, 0), ("v", 0, 1)], [("v", 0, 0), ("h", 1, 0)]])
            else:
                pairs = [LOOKUP[s]]
            segs = []
            for (k1, di1, dj1), (k2, di2, dj2) in pairs:
                e1 = (k1, i + di1, j + dj1)
                e2 = (k2, i + di2, j + dj2)
                segs.append((e1, e2))
            segments[(i, j)] = segs

    adjacency: dict = {}
    for cell, segs in segments.items():
        for k, (e1, e2) in enumerate(segs):
            adjacency.setdefault(e1, []).append((cell, k, e2))
            adjacency.setdefault(e2, []).append((cell, k, e1))

    used = set()
    polylines = []
    closed = []
    for cell, segs in sorted(segments.items()):
        for k, (e1, e2) in enumerate(segs):
            if (cell, k) in used:
                continue
            used.add((cell, k))
            chain = [e1, e2]
            for at_end in (True, False):
                while True:
                    e = chain[-1] if at_end else chain[0]
                    step = next(((c, kk, oe) for (c, kk, oe) in adjacency.get(e, ())
                                 if (c, kk) not in used), None)
                    if step is None:
                        break
                    c, kk, oe = step
                    used.add((c, kk))
                    chain.append(oe) if at_end else chain.insert(0, oe)
            pts = np.array([edge_point(*e) for e in chain])
            polylines.append(pts)
            closed.append(chain[0] == chain[-1])

    kind = "S1" if grid.field_kind == "constraint" else "S2_or_all"
    return ContourSet(grid.baseline, kind, polylines, closed,
                      ambiguous_saddles=ambiguous, gap_cells=gaps)


def intersect_with_delta(cs: ContourSet, delta: float) -> list[float]:
    """g values where the traced polylines cross the vertical line delta."""
    out = []
    for pts in cs.polylines:
        d = pts[:, 0]
        g = pts[:, 1]
        for a in np.nonzero((d[:-1] - delta) * (d[1:] - delta) < 0)[0]:
            f = (delta - d[a]) / (d[a + 1] - d[a])
            out.append(float(g[a] + f * (g[a + 1] - g[a])))
        for a in np.nonzero(d == delta)[0]:
            out.append(float(g[a]))
    return sorted(out)


CONTOUR_HEADER = ["baseline_N", "branch", "polyline_id", "vertex_index",
                  "delta", "g", "closed_flag"]


def write_contours_csv(cs: ContourSet, path, metadata: dict | None = None) -> None:
    """Contour CSV with the fixed vertex schema and a metadata echo header."""
    from .spectrum import format_float
    buf = io.StringIO()
    for k, v in (metadata or {}).items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CONTOUR_HEADER)
    for pid, (pts, cl) in enumerate(zip(cs.polylines, cs.closed)):
        for vid, (d, g) in enumerate(pts):
            w.writerow([str(cs.baseline.n_level), str(cs.baseline.branch),
                        str(pid), str(vid), format_float(d), format_float(g),
                        "1" if cl else "0"])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def emit_figure(baselines: list[Baseline], out_prefix: str,
                p_base: ModelParams, delta_range=(0.0, 6.0),
                g_range=(0.02, 3.0), resolution=600,
                t: Truncation = Truncation(),
                fields=("greg", "constraint"),
                metadata: dict | None = None) -> list[str]:
    """Trace and write contour CSVs for each baseline and requested field.

    Returns the list of file paths written, one per (baseline, field):
    '<prefix>_<label>_all.csv' for the full zero set and
    '<prefix>_<label>_s1.csv' for the constraint subset.
    """
    written = []
    for b in baselines:
        for fk in fields:
            grid = sample_plane(b, delta_range, g_range, resolution, p_base,
                                t, field_kind=fk)
            cs = trace_contours(grid)
            suffix = "s1" if fk == "constraint" else "all"
            path = f"{out_prefix}_{b.label()}_{suffix}.csv"
            meta = dict(metadata or {})
            meta.update({
                "baseline": b.label(), "field": fk,
                "delta_range": f"{delta_range[0]}:{delta_range[1]}",
                "g_range": f"{g_range[0]}:{g_range[1]}",
                "resolution": resolution if isinstance(resolution, int)
                else f"{resolution[0]}x{resolution[1]}",
            })
            write_contours_csv(cs, path, meta)
            written.append(path)
    return written
