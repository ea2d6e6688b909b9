"""Recursive series coefficients and the two series families R, Rbar.

The coefficients K_n satisfy the three-term recurrence

    n K_n = f_{n-1}(x) K_{n-1} - K_{n-2},    K_0 = 1, K_1 = f_0(x),

with

    f_n(x) = 2g/omega + (n omega - x +/- epsilon
                         + delta^2 / (x - n omega +/- epsilon)) / (2g),

the +/- selected by the branch.  The series

    R(x)    = sum_n K_n(x) (g/omega)^n
    Rbar(x) = sum_n K_n(x) / (x - n omega +/- epsilon) (g/omega)^n

are accumulated term-by-term in the scaled form T_n = K_n (g/omega)^n, which
stays O(2^-n) asymptotically even where the raw K_n grow geometrically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Branch, ModelParams, PoleProximity, Truncation


@dataclass(frozen=True)
class SeriesValue:
    """A truncated series value with its achieved stopping index."""

    value: float
    stop_index: int
    converged: bool


def _nearest_pole_index(x: float, p: ModelParams, b: Branch) -> int:
    """Index n >= 0 minimizing |x - (n*omega - sign*eps)| for the branch poles."""
    n = round((x + b.sign * p.epsilon) / p.omega)
    return max(0, int(n))


def check_pole_distance(x: float, p: ModelParams, b: Branch, t: Truncation,
                        n_hi: int | None = None) -> None:
    """Raise PoleProximity if x is within the guard of a branch pole n <= n_hi."""
    n_hi = t.n_max if n_hi is None else n_hi
    n = _nearest_pole_index(x, p, b)
    if n > n_hi:
        return
    pole = n * p.omega - b.sign * p.epsilon
    if abs(x - pole) < t.guard(p):
        raise PoleProximity(n, b, x, pole)


def f_coeff(n: int, x: float, p: ModelParams, b: Branch,
            t: Truncation = Truncation()) -> float:
    """Recurrence coefficient f_n(x) for the chosen branch.

    Raises PoleProximity when x is within the pole guard of the term's own
    pole at n*omega - sign*epsilon.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    p.require_coupling()
    den = x - n * p.omega + b.sign * p.epsilon
    if abs(den) < t.guard(p):
        raise PoleProximity(n, b, x, n * p.omega - b.sign * p.epsilon)
    return (2.0 * p.g / p.omega
            + (n * p.omega - x + b.sign * p.epsilon + p.delta ** 2 / den)
            / (2.0 * p.g))


def k_sequence(x: float, p: ModelParams, b: Branch,
               t: Truncation = Truncation()) -> np.ndarray:
    """Raw coefficients K_0 .. K_{n_max}.

    The raw values grow like (omega/2g)^n for large n; use the series
    evaluators for anything accumulated to high order.
    """
    p.require_coupling()
    # the recurrence consumes f_0 .. f_{n_max - 1}, so their poles are the
    # precondition; each f_coeff call enforces its own term again
    check_pole_distance(x, p, b, t, n_hi=t.n_max - 1)
    K = np.empty(t.n_max + 1)
    K[0] = 1.0
    K[1] = f_coeff(0, x, p, b, t)
    for n in range(2, t.n_max + 1):
        K[n] = (f_coeff(n - 1, x, p, b, t) * K[n - 1] - K[n - 2]) / n
    return K


def series_core(x, omega, g, delta, eps, sign, n_max, tail_tol, tail_run):
    """Vectorized evaluation of (R, Rbar, stop_index, converged).

    Arguments x, g, delta broadcast against each other; omega, eps, sign are
    scalars.  No pole-distance checks are made here; callers are responsible
    for keeping x away from (or deliberately near) the poles.
    """
    x, g, delta = np.broadcast_arrays(np.asarray(x, dtype=float),
                                      np.asarray(g, dtype=float),
                                      np.asarray(delta, dtype=float))
    t = g / omega
    d2 = delta * delta
    two_g = 2.0 * g

    T2 = np.ones(x.shape)                      # T_0
    R = T2.copy()
    Rbar = 1.0 / (x + sign * eps)
    f = 2.0 * g / omega + (-x + sign * eps + d2 / (x + sign * eps)) / two_g
    T1 = f * t                                 # T_1
    R = R + T1
    Rbar = Rbar + T1 / (x - omega + sign * eps)

    run = np.zeros(x.shape, dtype=np.int64)
    stop = np.full(x.shape, n_max, dtype=np.int64)
    done = np.zeros(x.shape, dtype=bool)
    for n in range(2, n_max + 1):
        m = n - 1
        den = x - m * omega + sign * eps
        f = 2.0 * g / omega + (m * omega - x + sign * eps + d2 / den) / two_g
        Tn = (f * t * T1 - (t * t) * T2) / n
        live = ~done
        R = np.where(live, R + Tn, R)
        Rbar = np.where(live, Rbar + Tn / (x - n * omega + sign * eps), Rbar)
        T2, T1 = T1, Tn
        small = np.abs(Tn) < tail_tol * np.maximum(np.abs(R), 1e-300)
        run = np.where(small, run + 1, 0)
        hit = live & (run >= tail_run)
        stop = np.where(hit, n, stop)
        done |= hit
        if done.all():
            break
    return R, Rbar, stop, done


def _series_pair(x: float, p: ModelParams, b: Branch, t: Truncation):
    """Scalar (R, Rbar, stop, converged) with the pole precondition enforced."""
    p.require_coupling()
    check_pole_distance(x, p, b, t, n_hi=t.n_max)
    R, Rbar, stop, conv = series_core(x, p.omega, p.g, p.delta, p.epsilon,
                                      b.sign, t.n_max, t.tail_tol, t.tail_run)
    return float(R), float(Rbar), int(stop), bool(conv)


def r_series(x: float, p: ModelParams, b: Branch,
             t: Truncation = Truncation()) -> SeriesValue:
    """Partial sum of R(x), stopped by the relative tail criterion."""
    R, _, stop, conv = _series_pair(x, p, b, t)
    return SeriesValue(R, stop, conv)


def rbar_series(x: float, p: ModelParams, b: Branch,
                t: Truncation = Truncation()) -> SeriesValue:
    """Partial sum of Rbar(x); same stopping rule as r_series."""
    _, Rbar, stop, conv = _series_pair(x, p, b, t)
    return SeriesValue(Rbar, stop, conv)
