"""The transcendental spectral function and its pole-regularized form.

G(x) = delta^2 Rbar+(x) Rbar-(x) - R+(x) R-(x) has simple or double poles at
x = n*omega +/- epsilon.  Multiplying by the factors

    prod_{n=0}^{n_prod} (x - n omega - epsilon)(x - n omega + epsilon)

cancels every pole in the scanned window, so zeros can be bracketed on a
plain grid.  The product grows factorially with the window size, hence all
regularized values are carried as (sign, log magnitude) pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (Baseline, Branch, ModelParams, PoleProximity, Truncation,
                    pole_positions)
from .series import check_pole_distance, series_core

LOG_TINY = -745.0  # below exp() underflow; stand-in for log(0)


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as sign and natural log of absolute value.

    sign is -1, 0 or +1; log_mag is meaningless when sign == 0 (kept at
    -inf so value() round-trips to 0.0).  Values built by from_float keep
    the construction float so the round trip is exact; derived values
    (products, limits) reconstruct through exp().
    """

    sign: int
    log_mag: float
    exact: float | None = None

    @classmethod
    def from_float(cls, v: float) -> "SignedLog":
        if v == 0.0 or not math.isfinite(v):
            if math.isnan(v):
                raise ValueError("cannot represent NaN as SignedLog")
            if math.isinf(v):
                return cls(1 if v > 0 else -1, math.inf)
            return cls(0, -math.inf)
        return cls(1 if v > 0 else -1, math.log(abs(v)), v)

    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        if self.exact is not None:
            return self.exact
        if self.log_mag > 709.0:
            return math.inf * self.sign
        return self.sign * math.exp(self.log_mag)

    def scaled(self, log_scale: float) -> float:
        """self / exp(log_scale) as an ordinary float."""
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_mag - log_scale)

    def __mul__(self, other: "SignedLog") -> "SignedLog":
        s = self.sign * other.sign
        if s == 0:
            return SignedLog(0, -math.inf)
        return SignedLog(s, self.log_mag + other.log_mag)

    def __neg__(self) -> "SignedLog":
        return SignedLog(-self.sign, self.log_mag)


def signedlog_product(values) -> SignedLog:
    """Product of an iterable of SignedLog factors (log-sum, exact order free)."""
    sign = 1
    log_mag = 0.0
    for v in values:
        if v.sign == 0:
            return SignedLog(0, -math.inf)
        sign *= v.sign
        log_mag += v.log_mag
    return SignedLog(sign, log_mag)


@dataclass(frozen=True)
class GValue:
    """A (regularized) G-function value with evaluation diagnostics."""

    value: SignedLog
    converged: bool
    stop_index: int


@dataclass(frozen=True)
class BaselineValue:
    """Finite limit of the regularized function at a baseline point.

    sign 0 means the limit is zero within the detection floor; ambiguous is
    set when the estimate sits just at the floor and no call should silently
    treat it either way.  sign_flip records whether the regularized function
    changes sign across x_p, which separates simple zeros (one eigenvalue)
    from double zeros (a degenerate pair).
    """

    value: SignedLog
    converged: bool
    stop_index: int
    ambiguous: bool
    sign_flip: bool
    floor_log: float


def default_n_prod(x_hi: float, omega: float) -> int:
    """Smallest product cutoff covering all poles up to x_hi."""
    return max(1, int(math.ceil(x_hi / omega)) + 1)


def _g_core(x, p: ModelParams, t: Truncation):
    """Vectorized plain G over broadcastable x (and optionally g, delta arrays).

    Returns (value, converged, stop) float/bool/int arrays.  No pole checks.
    """
    return _g_core_arrays(x, p.omega, p.g, p.delta, p.epsilon, t)


def _g_core_arrays(x, omega, g, delta, eps, t: Truncation):
    Rp, Rbp, stop_p, conv_p = series_core(x, omega, g, delta, eps, +1,
                                          t.n_max, t.tail_tol, t.tail_run)
    Rm, Rbm, stop_m, conv_m = series_core(x, omega, g, delta, eps, -1,
                                          t.n_max, t.tail_tol, t.tail_run)
    d2 = np.asarray(delta, dtype=float) ** 2
    val = d2 * Rbp * Rbm - Rp * Rm
    return val, conv_p & conv_m, np.maximum(stop_p, stop_m)


def _product_logsign(x, omega, eps, n_prod):
    """(sign, log|.|) of the pole-cancelling product at x (vectorized)."""
    x = np.asarray(x, dtype=float)
    sign = np.ones(x.shape, dtype=np.int8)
    logmag = np.zeros(x.shape)
    for n in range(n_prod + 1):
        for s in (-1.0, +1.0):
            f = x - n * omega + s * eps
            zero = f == 0.0
            sign = np.where(zero, 0, sign * np.sign(f).astype(np.int8))
            logmag = logmag + np.where(zero, LOG_TINY, np.log(np.abs(np.where(zero, 1.0, f))))
    return sign, logmag


def _greg_core(x, p: ModelParams, t: Truncation, n_prod: int):
    """Vectorized regularized G: returns (sign, logmag, converged, stop)."""
    val, conv, stop = _g_core(x, p, t)
    psign, plog = _product_logsign(x, p.omega, p.epsilon, n_prod)
    vzero = val == 0.0
    vsign = np.where(vzero, 0, np.sign(val)).astype(np.int8)
    vlog = np.where(vzero, LOG_TINY, np.log(np.abs(np.where(vzero, 1.0, val))))
    return (psign * vsign).astype(np.int8), plog + vlog, conv, stop


def g_eps(x: float, p: ModelParams, t: Truncation = Truncation()) -> GValue:
    """Plain G(x).  Raises PoleProximity within the guard of any pole."""
    p.require_coupling()
    for b in (Branch.PLUS, Branch.MINUS):
        check_pole_distance(x, p, b, t)
    val, conv, stop = _g_core(x, p, t)
    return GValue(SignedLog.from_float(float(val)), bool(conv), int(stop))


def g_reg(x: float, p: ModelParams, t: Truncation = Truncation(),
          n_prod: int | None = None, allow_near_pole: bool = False) -> GValue:
    """Regularized G(x), finite through the poles.

    n_prod defaults to the smallest cutoff covering all poles up to x; a
    larger cutoff only rescales the value by nonzero factors.  Pole-guard
    errors are suppressed with allow_near_pole (used by the baseline limit).
    """
    p.require_coupling()
    if n_prod is None:
        n_prod = default_n_prod(x, p.omega)
    elif n_prod < default_n_prod(x, p.omega):
        raise ValueError(f"n_prod = {n_prod} does not cover all poles below "
                         f"x = {x!r}")
    if not allow_near_pole:
        for b in (Branch.PLUS, Branch.MINUS):
            check_pole_distance(x, p, b, t)
    sign, logmag, conv, stop = _greg_core(x, p, t, n_prod)
    return GValue(SignedLog(int(sign), float(logmag)), bool(conv), int(stop))


def _baseline_estimate(vals_sign, vals_log, conv, stop):
    """Richardson limit from the four offset samples (+d, -d, +d/2, -d/2).

    Input arrays have shape (4, ...).  Returns dict of arrays: sign, logmag,
    is_zero, ambiguous, sign_flip, converged, stop, floor_log.

    The symmetric average kills the odd Laurent part; its leading error is
    O(d^2), removed by est = (4*avg(d/2) - avg(d)) / 3.  The detection floor
    10*|avg(d) - avg(d/2)| measures that same d^2 term, so |est| below the
    floor means the limit is zero to the accuracy the offsets can resolve.
    """
    L = np.max(np.where(vals_sign == 0, -np.inf, vals_log), axis=0)
    L = np.where(np.isfinite(L), L, 0.0)
    v = vals_sign * np.exp(vals_log - L)
    a = 0.5 * (v[0] + v[1])
    b = 0.5 * (v[2] + v[3])
    est = (4.0 * b - a) / 3.0
    floor = 10.0 * np.abs(b - a)
    is_zero = (np.abs(est) < floor) | (est == 0.0)
    ambiguous = (~is_zero) & (np.abs(est) < 2.0 * floor)
    sign_flip = vals_sign[0] * vals_sign[1] < 0
    ezero = est == 0.0
    sign = np.where(is_zero | ezero, 0, np.sign(est)).astype(np.int8)
    logmag = np.where(sign == 0, -np.inf,
                      np.log(np.abs(np.where(ezero, 1.0, est))) + L)
    floor_log = np.where(floor == 0.0, -np.inf,
                         np.log(np.where(floor == 0.0, 1.0, floor)) + L)
    return {
        "sign": sign, "logmag": logmag, "is_zero": is_zero,
        "ambiguous": ambiguous, "sign_flip": sign_flip,
        "converged": np.all(conv, axis=0), "stop": np.max(stop, axis=0),
        "floor_log": floor_log,
    }


def _baseline_core(b: Baseline, p: ModelParams, t: Truncation,
                   g=None, delta=None, delta_x: float | None = None):
    """Baseline limit, vectorized over optional g and delta arrays."""
    p.check_nonresonant()
    xp = b.x_p(p)
    dx = 1e-6 * p.omega if delta_x is None else delta_x
    n_prod = default_n_prod(xp + p.omega, p.omega)
    gv = p.g if g is None else np.asarray(g, dtype=float)
    dv = p.delta if delta is None else np.asarray(delta, dtype=float)
    signs, logs, convs, stops = [], [], [], []
    for off in (dx, -dx, dx / 2, -dx / 2):
        val, conv, stop = _g_core_arrays(xp + off, p.omega, gv, dv, p.epsilon, t)
        psign, plog = _product_logsign(xp + off, p.omega, p.epsilon, n_prod)
        vzero = val == 0.0
        vsign = np.where(vzero, 0, np.sign(val)).astype(np.int8)
        vlog = np.where(vzero, LOG_TINY, np.log(np.abs(np.where(vzero, 1.0, val))))
        signs.append(psign * vsign)
        logs.append(plog + vlog)
        convs.append(conv)
        stops.append(stop)
    return _baseline_estimate(np.array(signs), np.array(logs),
                              np.array(convs), np.array(stops))


def g_reg_at_baseline(b: Baseline, p: ModelParams,
                      t: Truncation = Truncation(),
                      delta_x: float | None = None) -> BaselineValue:
    """Finite limit of the regularized function at x_p = N*omega +/- epsilon.

    Computed by symmetric numeric limiting at x_p +/- d with one Richardson
    refinement at d/2 (d defaults to 1e-6 * omega).  The returned sign is 0
    when the estimate falls below the two-offset agreement floor.

    Raises ResonantParameters when 2*epsilon/omega is within 1e-6 of a
    nonzero integer.
    """
    p.require_coupling()
    r = _baseline_core(b, p, t, delta_x=delta_x)
    return BaselineValue(
        value=SignedLog(int(r["sign"]), float(r["logmag"])),
        converged=bool(r["converged"]), stop_index=int(r["stop"]),
        ambiguous=bool(r["ambiguous"]), sign_flip=bool(r["sign_flip"]),
        floor_log=float(r["floor_log"]))


def greg_grid(xs, p: ModelParams, t: Truncation, n_prod: int):
    """Regularized G over an x grid: (sign, logmag, converged, stop) arrays."""
    p.require_coupling()
    return _greg_core(np.asarray(xs, dtype=float), p, t, n_prod)
