"""Zero scanning and eigenvalue extraction.

Zeros of the regularized function are bracketed on a uniform x grid and
refined by bisection; baseline points x_p = N*omega +/- epsilon get the
numeric-limit treatment, with eigenvalue multiplicity read off the parity
of the zero (sign flip across x_p means a simple zero carrying one
eigenvalue, no flip means a double zero carrying a degenerate pair).
Eigenvalues follow as E = x - g^2/omega.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .gfunction import default_n_prod, greg_grid, _baseline_core
from .model import (Baseline, ModelParams, Truncation, WindowExhausted,
                    baselines_in_window, pole_positions)

BISECT_TOL_FACTOR = 1e-10      # refinement tolerance, relative to omega
BASELINE_DEDUP = 1e-6          # radius (in omega units) merging roots onto x_p


@dataclass(frozen=True)
class SpectralPoint:
    """One zero of the regularized function, ordered by x.

    index      ordinal of the zero, ascending in x (degenerate pairs share x
               and occupy consecutive indices)
    x          spectral variable at the zero
    energy     E = x - g^2/omega
    on_baseline  the Baseline when x sits at N*omega +/- epsilon
    converged  False when a series evaluation hit n_max with the tail
               criterion unmet somewhere along the refinement
    """

    index: int
    x: float
    energy: float
    on_baseline: Baseline | None = None
    converged: bool = True


def _grid(x_lo, x_hi, step, p):
    xs = np.arange(x_lo, x_hi + 0.5 * step, step)
    guard = 1e-7 * p.omega
    for q in pole_positions(p, x_lo - 1.0, x_hi + 1.0):
        hit = np.abs(xs - q) < guard
        if hit.any():
            xs = xs.copy()
            xs[hit] += 0.37 * step
    return xs


def _brackets(xs, signs):
    """Indices i where a sign change occurs between grid nodes i and i+1."""
    s = signs.astype(int)
    prod = s[:-1] * s[1:]
    return np.nonzero(prod < 0)[0]


def _bisect_batch(a, b, fa_sign, p, t, n_prod, tol):
    """Vectorized bisection on the regularized function.

    a, b are bracket endpoint arrays with sign(f(a)) = fa_sign and opposite
    sign at b.  Returns (roots, converged_flags).
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    fa = np.array(fa_sign, dtype=np.int8)
    conv = np.ones(a.shape, dtype=bool)
    if a.size == 0:
        return a, conv
    n_iter = max(1, int(math.ceil(math.log2(float(np.max(np.abs(b - a))) / tol))) + 1)
    for _ in range(n_iter):
        mid = 0.5 * (a + b)
        msign, _, mconv, _ = greg_grid(mid, p, t, n_prod)
        conv &= mconv
        same = msign == fa
        exact = msign == 0
        a = np.where(same & ~exact, mid, a)
        b = np.where(~same | exact, mid, b)
        if np.max(b - a) < tol:
            break
    return 0.5 * (a + b), conv


def scan_zeros(p: ModelParams, x_lo: float, x_hi: float,
               grid_step: float | None = None,
               t: Truncation = Truncation()) -> list[SpectralPoint]:
    """All zeros of the regularized function in [x_lo, x_hi], in order.

    Sign changes on the grid are bisected to 1e-10 * omega; baseline points
    where the numeric limit vanishes are inserted (twice for double zeros);
    a bisected root landing on a baseline is merged with the insertion.
    """
    if not x_lo < x_hi:
        raise ValueError(f"need x_lo < x_hi, got [{x_lo}, {x_hi}]")
    step = p.omega / 40.0 if grid_step is None else grid_step
    if step > p.omega / 20.0:
        raise ValueError(f"grid_step = {step} too coarse; need <= omega/20 "
                         "to resolve adjacent roots")
    p.require_coupling()
    p.check_nonresonant()
    tol = BISECT_TOL_FACTOR * p.omega
    n_prod = default_n_prod(x_hi + p.omega, p.omega)

    xs = _grid(x_lo, x_hi, step, p)
    signs, _, conv, _ = greg_grid(xs, p, t, n_prod)
    idx = list(_brackets(xs, signs))

    # adaptive refinement: two sign changes within 3 cells get 3x density
    raw_spans = []
    for i, j in zip(idx[:-1], idx[1:]):
        if j - i <= 2:
            raw_spans.append((max(0, i - 1), min(len(xs) - 2, j + 1)))
    refined_spans = []
    for lo_i, hi_i in raw_spans:           # merge overlaps to avoid re-finds
        if refined_spans and lo_i <= refined_spans[-1][1]:
            refined_spans[-1] = (refined_spans[-1][0],
                                 max(refined_spans[-1][1], hi_i))
        else:
            refined_spans.append((lo_i, hi_i))
    extra = []
    drop = set()
    for lo_i, hi_i in refined_spans:
        fine = np.linspace(xs[lo_i], xs[hi_i + 1], 3 * (hi_i + 1 - lo_i) + 1)
        fsigns, _, fconv, _ = greg_grid(fine, p, t, n_prod)
        for k in _brackets(fine, fsigns):
            extra.append((fine[k], fine[k + 1], fsigns[k]))
        for k in range(lo_i, hi_i + 1):
            drop.add(k)
    br = [(xs[i], xs[i + 1], signs[i]) for i in idx if i not in drop] + extra

    roots: list[tuple[float, bool]] = []
    if br:
        a = [x[0] for x in br]
        b = [x[1] for x in br]
        fs = [x[2] for x in br]
        rr, rconv = _bisect_batch(a, b, fs, p, t, n_prod, tol)
        roots = [(float(r), bool(c)) for r, c in zip(rr, rconv)]
    scan_converged = bool(conv.all())

    # exact zeros on grid nodes (measure-zero but cheap to honor)
    for k in np.nonzero(signs == 0)[0]:
        roots.append((float(xs[k]), True))

    points: list[tuple[float, Baseline | None, bool]] = []
    dedup = BASELINE_DEDUP * p.omega
    consumed = [False] * len(roots)
    for bl in baselines_in_window(p, x_lo, x_hi):
        res = _baseline_core(bl, p, t)
        if not bool(res["is_zero"]):
            continue
        mult = 1 if bool(res["sign_flip"]) else 2
        for k, (r, _c) in enumerate(roots):
            if abs(r - bl.x_p(p)) < dedup:
                consumed[k] = True
        for _ in range(mult):
            points.append((bl.x_p(p), bl, bool(res["converged"])))
    for k, (r, c) in enumerate(roots):
        if not consumed[k]:
            points.append((r, None, c and scan_converged))

    points.sort(key=lambda q: q[0])
    return [SpectralPoint(i, x, x - p.g * p.g / p.omega, bl, cv)
            for i, (x, bl, cv) in enumerate(points)]


def energy_levels(p: ModelParams, count: int,
                  t: Truncation = Truncation(),
                  max_span: float | None = None) -> list[SpectralPoint]:
    """The lowest `count` spectral points.

    The window opens below the g -> 0 ground energy, at
    E = -(sqrt(delta^2 + epsilon^2) + omega), and extends upward until
    enough zeros are found or the span ceiling is hit.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    e_lo = -(math.hypot(p.delta, p.epsilon) + p.omega)
    x_lo = e_lo + p.g * p.g / p.omega
    ceiling = max_span if max_span is not None else (40.0 + 2.0 * count) * p.omega
    span = min((count + 2) * p.omega, ceiling)
    while True:
        pts = scan_zeros(p, x_lo, x_lo + span, t=t)
        if len(pts) >= count:
            return [SpectralPoint(i, q.x, q.energy, q.on_baseline, q.converged)
                    for i, q in enumerate(pts[:count])]
        if span >= ceiling:
            raise WindowExhausted(
                f"found {len(pts)} < {count} zeros with window span {span:.3g}")
        span = min(span + 2.0 * p.omega, ceiling)


@dataclass
class SpectrumSweep:
    """Energy levels on a coupling grid, one column per g value."""

    omega: float
    delta: float
    epsilon: float
    count: int
    g_values: np.ndarray
    levels: list[list[SpectralPoint]]
    truncated: list[bool] = field(default_factory=list)

    def energies(self) -> np.ndarray:
        """(n_g, count) array of energies; NaN where a column is short."""
        out = np.full((len(self.g_values), self.count), np.nan)
        for i, col in enumerate(self.levels):
            for j, q in enumerate(col[:self.count]):
                out[i, j] = q.energy
        return out

    def baseline_energy(self, n: int, sign: int) -> np.ndarray:
        return n * self.omega - self.g_values ** 2 / self.omega + sign * self.epsilon


def sweep_spectrum(p_base: ModelParams, g_lo: float, g_hi: float, steps: int,
                   count: int, t: Truncation = Truncation()) -> SpectrumSweep:
    """Lowest `count` levels for g on a uniform grid from g_lo to g_hi."""
    if not (0 < g_lo < g_hi):
        raise ValueError(f"need 0 < g_lo < g_hi, got [{g_lo}, {g_hi}]")
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    gs = np.linspace(g_lo, g_hi, steps)
    levels = []
    truncated = []
    for g in gs:
        p = p_base.replace(g=float(g))
        try:
            col = energy_levels(p, count, t)
            truncated.append(False)
        except WindowExhausted:
            x_lo = -(math.hypot(p.delta, p.epsilon) + p.omega) + p.g ** 2 / p.omega
            col = scan_zeros(p, x_lo, x_lo + (count + 42) * p.omega, t=t)[:count]
            truncated.append(True)
        levels.append(col)
    return SpectrumSweep(p_base.omega, p_base.delta, p_base.epsilon, count,
                         gs, levels, truncated)


def continuity_gaps(sweep: SpectrumSweep) -> float:
    """Largest |dE| between adjacent g columns, normalized by the local
    slope bound |dE/dg| <= 2 g_max / omega + 2 (loose but parameter free)."""
    E = sweep.energies()
    dg = np.diff(sweep.g_values)
    bound = (2.0 * np.abs(sweep.g_values[1:]) / sweep.omega + 2.0) * dg
    jumps = np.abs(np.diff(E, axis=0))
    with np.errstate(invalid="ignore"):
        ratio = jumps / bound[:, None]
    return float(np.nanmax(ratio)) if np.isfinite(ratio).any() else 0.0


SWEEP_HEADER = ["g", "N", "x", "E", "on_baseline"]


def format_float(v: float) -> str:
    return f"{v:.15g}"


def sweep_rows(sweep: SpectrumSweep, oracle_dev=None):
    """Iterate CSV rows (long format, one row per (g, level))."""
    for i, g in enumerate(sweep.g_values):
        for q in sweep.levels[i]:
            row = [format_float(float(g)), str(q.index), format_float(q.x),
                   format_float(q.energy),
                   q.on_baseline.label() if q.on_baseline else ""]
            if oracle_dev is not None:
                row.append(format_float(oracle_dev[i][q.index]))
            yield row


def write_sweep_csv(sweep: SpectrumSweep, path, metadata: dict | None = None,
                    oracle_dev=None) -> None:
    """Sweep CSV: header g,N,x,E,on_baseline (plus oracle_dE when supplied).

    Metadata is echoed as leading '# key=value' comment lines so identical
    configurations produce byte-identical files.
    """
    buf = io.StringIO()
    for k, v in (metadata or {}).items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    header = list(SWEEP_HEADER) + (["oracle_dE"] if oracle_dev is not None else [])
    w.writerow(header)
    for row in sweep_rows(sweep, oracle_dev):
        w.writerow(row)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def write_baseline_csv(sweep: SpectrumSweep, path, n_max: int,
                       metadata: dict | None = None) -> None:
    """Analytic baseline table: rows g,N,E_plus,E_minus for N = 0..n_max."""
    buf = io.StringIO()
    for k, v in (metadata or {}).items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["g", "N", "E_plus", "E_minus"])
    for g in sweep.g_values:
        par = float(g) ** 2 / sweep.omega
        for n in range(n_max + 1):
            w.writerow([format_float(float(g)), str(n),
                        format_float(n * sweep.omega - par + sweep.epsilon),
                        format_float(n * sweep.omega - par - sweep.epsilon)])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def read_sweep_csv(path):
    """Round-trip reader for the sweep CSV; returns (metadata, rows)."""
    meta = {}
    rows = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                meta[k.strip()] = v
                continue
            rows.append(line.rstrip("\n"))
    rdr = csv.reader(rows)
    header = next(rdr)
    out = [dict(zip(header, r)) for r in rdr]
    return meta, out
