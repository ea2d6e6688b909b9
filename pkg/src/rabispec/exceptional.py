"""Location and classification of exceptional points on the baselines.

On the baseline E = N*omega - g^2/omega +/- epsilon the regularized
function, restricted to x_p, factorizes as (constraint value) times a
residual function of the parameters.  Its zeros therefore split into

  S1  zeros of the constraint value K_N at x_p (evaluated on the series
      branch opposite to the baseline branch), the classic
      constraint-polynomial (Juddian-type) points, and
  S2  the remaining zeros, where the residual factor vanishes instead.

Every located point is cross-checked against the diagonalization oracle;
the measured level structure at the baseline energy is recorded on the
point rather than assumed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gfunction import _baseline_core, g_reg_at_baseline
from .model import Baseline, Branch, ModelParams, NotExceptional, Truncation
from .oracle import oracle_energies, recommended_cutoff

BISECT_TOL = 1e-10        # absolute tolerance on g roots
S1_EXCLUSION = 1e-6       # radius separating S2 roots from S1 roots
DEGENERACY_GAP = 1e-6     # oracle pair separation declaring a double level


@dataclass(frozen=True)
class OracleCheck:
    """Measured oracle level structure at a candidate point's energy."""

    cutoff: int
    nearest_error: float      # |closest eigenvalue - baseline energy|
    pair_gap: float           # separation of the two closest eigenvalues
    n_within_1e4: int
    n_within_1e2: int

    @property
    def degenerate(self) -> bool:
        return self.nearest_error < 1e-4 and self.pair_gap < DEGENERACY_GAP

    @property
    def single(self) -> bool:
        return self.nearest_error < 1e-4 and self.n_within_1e2 == 1


@dataclass(frozen=True)
class ExceptionalPoint:
    """A located baseline zero with its classification."""

    baseline: Baseline
    delta: float
    g: float
    x_p: float
    energy: float
    kind: str                       # "S1" | "S2" | "ambiguous"
    constraint_value: float
    greg_zero: bool = True
    greg_ambiguous: bool = False
    oracle: OracleCheck | None = None


def _constraint_grid(b: Baseline, p: ModelParams, g=None, delta=None):
    """K_N of the opposite branch at x_p, vectorized over g and/or delta.

    Only indices n <= N enter, so no singular recurrence step occurs for
    non-resonant parameters.
    """
    gv = np.asarray(p.g if g is None else g, dtype=float)
    dv = np.asarray(p.delta if delta is None else delta, dtype=float)
    gv, dv = np.broadcast_arrays(gv, dv)
    xp = b.x_p(p)
    s = b.series_branch.sign
    N = b.n_level
    if N == 0:
        return np.ones(gv.shape)
    d2 = dv * dv
    two_g = 2.0 * gv
    K2 = np.ones(gv.shape)
    K1 = (2.0 * gv / p.omega
          + (-xp + s * p.epsilon + d2 / (xp + s * p.epsilon)) / two_g)
    for n in range(2, N + 1):
        m = n - 1
        f = (2.0 * gv / p.omega
             + (m * p.omega - xp + s * p.epsilon
                + d2 / (xp - m * p.omega + s * p.epsilon)) / two_g)
        K2, K1 = K1, (f * K1 - K2) / n
    return K1


def constraint_value(b: Baseline, p: ModelParams,
                     t: Truncation = Truncation()) -> float:
    """K_N^(opposite branch)(x_p); identically 1 for N = 0."""
    p.require_coupling()
    p.check_nonresonant()
    return float(_constraint_grid(b, p))


def _oracle_check(b: Baseline, p: ModelParams, cutoff: int | None) -> OracleCheck:
    M = cutoff if cutoff is not None else recommended_cutoff(p)
    energy = b.energy(p)
    vals = oracle_energies(p, M)
    d = np.abs(vals - energy)
    order = np.argsort(d)
    nearest = float(d[order[0]])
    pair_gap = float(abs(vals[order[1]] - vals[order[0]])) if len(vals) > 1 else math.inf
    return OracleCheck(M, nearest, pair_gap,
                       int(np.sum(d < 1e-4)), int(np.sum(d < 1e-2)))


def _bisect_scalar(fn, a, b, fa, tol=BISECT_TOL):
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = fn(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
        if b - a < tol:
            break
    return 0.5 * (a + b)


def find_s1(b: Baseline, delta: float, g_lo: float, g_hi: float,
            p_base: ModelParams, t: Truncation = Truncation(),
            verify: bool = True, cutoff: int | None = None,
            grid_points: int = 401) -> list[ExceptionalPoint]:
    """Roots of g -> constraint value on (g_lo, g_hi] at fixed delta.

    N = 0 baselines have constraint value identically 1 and return empty.
    Each root is checked for a baseline zero of the regularized function
    and (optionally) against the oracle; results are recorded, not used to
    drop points.
    """
    if g_lo <= 0:
        raise ValueError(f"g_lo must be positive, got {g_lo}")
    p0 = p_base.replace(delta=delta)
    p0.check_nonresonant()
    if b.n_level == 0:
        return []
    gs = np.linspace(g_lo, g_hi, grid_points)
    vals = _constraint_grid(b, p0, g=gs)
    out = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        fn = lambda g: float(_constraint_grid(b, p0, g=g))
        root = _bisect_scalar(fn, float(gs[i]), float(gs[i + 1]), vals[i])
        out.append(_make_point(b, p0, float(root), "S1", t, verify, cutoff))
    return out


def find_s2(b: Baseline, delta: float, g_lo: float, g_hi: float,
            p_base: ModelParams, t: Truncation = Truncation(),
            verify: bool = True, cutoff: int | None = None,
            grid_points: int = 401) -> list[ExceptionalPoint]:
    """Baseline zeros of the regularized function that are not S1 roots.

    Sign changes of g -> regularized value at x_p are bisected, then any
    root within the exclusion radius of a constraint root is removed.
    """
    if g_lo <= 0:
        raise ValueError(f"g_lo must be positive, got {g_lo}")
    p0 = p_base.replace(delta=delta)
    p0.check_nonresonant()
    s1_roots = [q.g for q in find_s1(b, delta, g_lo, g_hi, p_base, t,
                                     verify=False, grid_points=grid_points)]
    gs = np.linspace(g_lo, g_hi, grid_points)
    res = _baseline_core(b, p0, t, g=gs)
    signs = res["sign"]
    out = []
    for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
        def fn(g):
            r = _baseline_core(b, p0, t, g=g)
            return float(r["sign"]) * math.exp(min(float(r["logmag"]), 700.0))
        root = _bisect_scalar(fn, float(gs[i]), float(gs[i + 1]), float(signs[i]))
        if any(abs(root - r1) < S1_EXCLUSION for r1 in s1_roots):
            continue
        K = float(_constraint_grid(b, p0, g=root))
        kind = "S2" if abs(K) > _s1_tolerance(b, p0, root) * 10 else "ambiguous"
        out.append(_make_point(b, p0, root, kind, t, verify, cutoff))
    return out


def _s1_tolerance(b: Baseline, p0: ModelParams, g: float) -> float:
    """|K| threshold for S1 at coupling g: 1e-8 scaled by the local slope."""
    h = 1e-5 * max(abs(g), 1.0)
    k1 = float(_constraint_grid(b, p0, g=g + h))
    k0 = float(_constraint_grid(b, p0, g=max(g - h, h * 0.1)))
    slope = abs(k1 - k0) / (g + h - max(g - h, h * 0.1))
    return 1e-8 * max(slope, 1.0)


def _baseline_zero_check(b: Baseline, p: ModelParams, t: Truncation):
    """Scale-aware baseline zero test at the candidate coupling.

    A bisected root carries ~1e-10 slack in g, so the raw detection floor
    can read pure noise there.  Instead the magnitude at the candidate is
    compared against the off-root scale |regularized value| at g +/- 1%:
    4 orders below is zero, within 2 orders is not, in between ambiguous.
    """
    bv = g_reg_at_baseline(b, p, t)
    if bv.value.sign == 0:
        return True, bv.ambiguous
    h = 1e-2 * max(abs(p.g), 0.1)
    ref = -math.inf
    for gq in (p.g - h, p.g + h):
        if gq <= 0:
            continue
        w = g_reg_at_baseline(b, p.replace(g=gq), t)
        if w.value.sign != 0:
            ref = max(ref, w.value.log_mag)
    if not math.isfinite(ref):
        return False, True
    ratio_log = bv.value.log_mag - ref
    if ratio_log < math.log(1e-4):
        return True, False
    return False, ratio_log < math.log(1e-2)


def _make_point(b: Baseline, p0: ModelParams, g: float, kind: str,
                t: Truncation, verify: bool, cutoff: int | None) -> ExceptionalPoint:
    p = p0.replace(g=g)
    zero, amb = _baseline_zero_check(b, p, t)
    oc = _oracle_check(b, p, cutoff) if verify else None
    return ExceptionalPoint(
        baseline=b, delta=p0.delta, g=g, x_p=b.x_p(p), energy=b.energy(p),
        kind=kind, constraint_value=float(_constraint_grid(b, p0, g=g)),
        greg_zero=zero, greg_ambiguous=amb, oracle=oc)


def classify(b: Baseline, delta: float, g: float, p_base: ModelParams,
             t: Truncation = Truncation(), verify: bool = True,
             cutoff: int | None = None) -> ExceptionalPoint:
    """Classify a candidate baseline point as S1, S2 or ambiguous.

    Requires the regularized function to vanish at x_p (NotExceptional
    otherwise).  S1 means the constraint value K_N is zero within a
    tolerance scaled by its local g-derivative; the measured oracle level
    structure is attached either way.
    """
    p = p_base.replace(delta=delta, g=g)
    p.require_coupling()
    zero, amb = _baseline_zero_check(b, p, t)
    if not zero and not amb:
        bv = g_reg_at_baseline(b, p, t)
        raise NotExceptional(
            f"regularized value at x_p = {b.x_p(p):.6g} is nonzero "
            f"(log magnitude {bv.value.log_mag:.3g}, floor {bv.floor_log:.3g})")
    K = float(_constraint_grid(b, p, g=g))
    tol = _s1_tolerance(b, p, g)
    if abs(K) < tol:
        kind = "S1"
    elif abs(K) >= 10 * tol:
        kind = "S2"
    else:
        kind = "ambiguous"
    oc = _oracle_check(b, p, cutoff) if verify else None
    return ExceptionalPoint(
        baseline=b, delta=delta, g=g, x_p=b.x_p(p), energy=b.energy(p),
        kind=kind, constraint_value=K, greg_zero=zero,
        greg_ambiguous=amb, oracle=oc)


def point_record(q: ExceptionalPoint) -> dict:
    """JSON-ready record for one exceptional point."""
    rec = {
        "N": q.baseline.n_level,
        "branch": str(q.baseline.branch),
        "delta": q.delta,
        "g": q.g,
        "x_p": q.x_p,
        "energy": q.energy,
        "class": q.kind,
        "constraint_value": q.constraint_value,
        "greg_zero": q.greg_zero,
    }
    if q.greg_ambiguous:
        rec["greg_ambiguous"] = True
    if q.oracle is not None:
        rec["oracle"] = {
            "cutoff": q.oracle.cutoff,
            "nearest_error": q.oracle.nearest_error,
            "pair_gap": q.oracle.pair_gap,
            "n_within_1e4": q.oracle.n_within_1e4,
            "n_within_1e2": q.oracle.n_within_1e2,
            "degenerate": q.oracle.degenerate,
        }
    return rec
