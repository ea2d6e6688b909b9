"""Independent ground truth by dense diagonalization.

The Hamiltonian

    H = omega a^dag a + g sigma_x (a^dag + a) + delta sigma_z + eps sigma_x

is assembled in the sigma_x eigenbasis, where it is real symmetric: two
Fock blocks omega*diag(n) +/- (g sqrt(n+1) off-diagonals + eps on the
diagonal), coupled by delta times the identity.  Eigenvalues come from a
cyclic Jacobi sweep (round-robin ordering, rotations on disjoint index
pairs applied as one batch), deliberately independent of the series code
it cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams


@dataclass(frozen=True)
class DenseSymmetric:
    """A real symmetric matrix; symmetry is exact by construction."""

    order: int
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (self.order, self.order):
            raise ValueError("entries shape does not match order")
        if not np.isfinite(self.entries).all():
            raise ValueError("matrix entries must be finite")
        if not np.array_equal(self.entries, self.entries.T):
            raise ValueError("matrix must be exactly symmetric")


def build_hamiltonian(p: ModelParams, fock_cutoff: int) -> DenseSymmetric:
    """Truncated Hamiltonian of order 2*M in the sigma_x eigenbasis.

    g = 0 and delta = 0 are both accepted here (unlike the series path).
    """
    if fock_cutoff < 2:
        raise ValueError(f"fock_cutoff must be >= 2, got {fock_cutoff}")
    M = fock_cutoff
    n = np.arange(M, dtype=float)
    off = p.g * np.sqrt(n[1:])
    Hp = np.diag(p.omega * n + p.epsilon) + np.diag(off, 1) + np.diag(off, -1)
    Hm = np.diag(p.omega * n - p.epsilon) - np.diag(off, 1) - np.diag(off, -1)
    coup = p.delta * np.eye(M)
    H = np.block([[Hp, coup], [coup, Hm]])
    H = 0.5 * (H + H.T)  # bitwise symmetry against accumulation order
    return DenseSymmetric(2 * M, H)


@dataclass(frozen=True)
class EigenResult:
    """Sorted eigenvalues plus Jacobi convergence diagnostics."""

    values: np.ndarray
    sweeps: int
    converged: bool


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Tournament schedule: n-1 rounds of n/2 disjoint pairs covering every
    (p, q) pair exactly once per sweep."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        p = np.array([players[i] for i in range(n // 2)])
        q = np.array([players[n - 1 - i] for i in range(n // 2)])
        rounds.append((p, q))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def eigenvalues(m: DenseSymmetric, tol: float = 1e-12,
                max_sweeps: int = 100) -> EigenResult:
    """All eigenvalues by cyclic Jacobi rotations, sorted ascending.

    Converged when the off-diagonal Frobenius mass drops below tol times
    the Frobenius norm; hitting max_sweeps returns the partial result with
    converged = False.
    """
    A = np.array(m.entries, dtype=float)
    n = m.order
    if n == 1:
        return EigenResult(A[0, :1].copy(), 0, True)
    padded = n % 2 == 1
    if padded:
        # round-robin wants an even player count; a zero row/col is inert
        A = np.pad(A, ((0, 1), (0, 1)))
        n += 1
    rounds = _round_robin(n)
    fro = float(np.linalg.norm(A))
    converged = fro == 0.0
    sweeps = 0
    for _ in range(max_sweeps):
        off2 = float(np.sum(A * A) - np.sum(np.diag(A) ** 2))
        if off2 <= (tol * fro) ** 2:
            converged = True
            break
        for pi, qi in rounds:
            apq = A[pi, qi]
            nz = apq != 0.0
            if not nz.any():
                continue
            # smallest rotation zeroing a_pq: t = sgn/(|th| + sqrt(th^2+1))
            th = np.zeros_like(apq)
            tt = np.zeros_like(apq)
            with np.errstate(over="ignore", divide="ignore"):
                th[nz] = (A[qi, qi][nz] - A[pi, pi][nz]) / (2.0 * apq[nz])
                big = np.abs(th[nz]) > 1e150
                tt[nz] = np.where(
                    th[nz] == 0.0, 1.0,
                    np.where(big, np.where(th[nz] == 0.0, 0.0, 0.5 / th[nz]),
                             np.sign(th[nz]) / (np.abs(th[nz])
                                                + np.sqrt(np.where(big, 1.0, th[nz]) ** 2
                                                          + 1.0))))
            c = 1.0 / np.sqrt(tt * tt + 1.0)
            s = tt * c
            rp = A[pi, :].copy()
            rq = A[qi, :].copy()
            A[pi, :] = c[:, None] * rp - s[:, None] * rq
            A[qi, :] = s[:, None] * rp + c[:, None] * rq
            cp = A[:, pi].copy()
            cq = A[:, qi].copy()
            A[:, pi] = c[None, :] * cp - s[None, :] * cq
            A[:, qi] = s[None, :] * cp + c[None, :] * cq
        sweeps += 1
    vals = np.sort(np.diag(A))
    if padded:
        # drop the single injected zero eigenvalue
        k = int(np.argmin(np.abs(vals)))
        vals = np.delete(vals, k)
    return EigenResult(vals, sweeps, converged)


def recommended_cutoff(p: ModelParams) -> int:
    """Fock cutoff heuristic: 60 covers |g| <= omega; grow with (g/omega)^2."""
    return max(60, int(math.ceil(40 + 8.0 * (p.g / p.omega) ** 2)))


def oracle_energies(p: ModelParams, fock_cutoff: int | None = None,
                    count: int | None = None) -> np.ndarray:
    """Sorted eigenvalues of the truncated Hamiltonian (convenience path)."""
    M = fock_cutoff if fock_cutoff is not None else recommended_cutoff(p)
    res = eigenvalues(build_hamiltonian(p, M))
    vals = res.values
    return vals[:count] if count is not None else vals


def cutoff_agreement(p: ModelParams, fock_cutoff: int, count: int,
                     bump: int = 20) -> float:
    """Max |E_k(M) - E_k(M + bump)| over the lowest `count` levels."""
    a = oracle_energies(p, fock_cutoff, count)
    b = oracle_energies(p, fock_cutoff + bump, count)
    return float(np.max(np.abs(a - b)))
