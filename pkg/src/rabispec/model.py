"""Shared parameter types, baselines, and error classes.

The spectral variable throughout is x = E + g^2/omega, so that eigenvalues
are recovered as E = x - g^2/omega.  Exceptional baselines sit at
x_p = N*omega + epsilon (plus branch) or x_p = N*omega - epsilon (minus
branch).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Branch(Enum):
    """Selects the +/- superscript of the two series families."""

    PLUS = +1
    MINUS = -1

    @property
    def sign(self) -> int:
        return self.value

    @property
    def opposite(self) -> "Branch":
        return Branch.MINUS if self is Branch.PLUS else Branch.PLUS

    def __str__(self) -> str:
        return "plus" if self is Branch.PLUS else "minus"


def branch_from_str(s: str) -> Branch:
    key = s.strip().lower()
    if key in ("plus", "+", "p"):
        return Branch.PLUS
    if key in ("minus", "-", "m"):
        return Branch.MINUS
    raise ValueError(f"unknown branch {s!r} (expected 'plus' or 'minus')")


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the generalized Rabi Hamiltonian.

    omega   boson frequency, > 0
    g       qubit-boson coupling; g = 0 is accepted only by the
            diagonalization oracle (the series recurrence divides by 2g)
    delta   level splitting
    epsilon bias term breaking parity symmetry
    """

    omega: float
    g: float
    delta: float
    epsilon: float = 0.0

    def __post_init__(self):
        for name in ("omega", "g", "delta", "epsilon"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    def require_coupling(self) -> None:
        """Series evaluations divide by 2g; reject g = 0 up front."""
        if self.g == 0.0:
            raise ValueError("g = 0 is not valid for G-function evaluation "
                             "(use the oracle module instead)")

    def resonance_offset(self) -> float:
        """Distance of 2*epsilon/omega from the nearest nonzero integer."""
        k = 2.0 * self.epsilon / self.omega
        kn = round(k)
        if kn == 0:
            return math.inf
        return abs(k - kn)

    def check_nonresonant(self, tol: float = 1e-6) -> None:
        if self.resonance_offset() < tol:
            raise ResonantParameters(
                f"2*epsilon/omega = {2 * self.epsilon / self.omega:.9g} is within "
                f"{tol:g} of a nonzero integer; pole collisions between the two "
                "branch families are not supported")

    def replace(self, **kw) -> "ModelParams":
        d = {"omega": self.omega, "g": self.g, "delta": self.delta,
             "epsilon": self.epsilon}
        d.update(kw)
        return ModelParams(**d)


@dataclass(frozen=True)
class Truncation:
    """Series/product cutoffs and tolerances.

    pole_guard = None means the default 1e-8 * omega, resolved per model.
    """

    n_max: int = 200
    tail_tol: float = 1e-14
    tail_run: int = 5
    pole_guard: float | None = None

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError(f"n_max must be >= 2, got {self.n_max}")
        if self.tail_tol <= 0:
            raise ValueError(f"tail_tol must be positive, got {self.tail_tol}")
        if self.tail_run < 1:
            raise ValueError(f"tail_run must be >= 1, got {self.tail_run}")
        if self.pole_guard is not None and self.pole_guard <= 0:
            raise ValueError(f"pole_guard must be positive, got {self.pole_guard}")

    def guard(self, p: ModelParams) -> float:
        return self.pole_guard if self.pole_guard is not None else 1e-8 * p.omega


@dataclass(frozen=True)
class Baseline:
    """An exceptional-energy candidate: E = N*omega - g^2/omega +/- epsilon.

    The pole cancelled at x_p belongs to the series branch OPPOSITE to the
    baseline branch: a plus baseline (x_p = N*omega + epsilon) is a pole of
    the minus-branch series, whose denominators are x - n*omega - epsilon.
    """

    n_level: int
    branch: Branch

    def __post_init__(self):
        if self.n_level < 0:
            raise ValueError(f"n_level must be >= 0, got {self.n_level}")

    def x_p(self, p: ModelParams) -> float:
        return self.n_level * p.omega + self.branch.sign * p.epsilon

    def energy(self, p: ModelParams) -> float:
        return self.x_p(p) - p.g * p.g / p.omega

    @property
    def series_branch(self) -> Branch:
        """Branch of the series family that is singular at x_p."""
        return self.branch.opposite

    def label(self) -> str:
        return f"{self.n_level}{'+' if self.branch is Branch.PLUS else '-'}"


def baseline_from_label(label: str) -> Baseline:
    label = label.strip()
    if not label or label[-1] not in "+-":
        raise ValueError(f"bad baseline label {label!r} (expected like '2+')")
    return Baseline(int(label[:-1]),
                    Branch.PLUS if label[-1] == "+" else Branch.MINUS)


def pole_positions(p: ModelParams, x_lo: float, x_hi: float) -> list[float]:
    """Sorted distinct pole positions n*omega +/- epsilon inside [x_lo, x_hi]."""
    out = set()
    n = 0
    while n * p.omega - abs(p.epsilon) <= x_hi:
        for s in (+1, -1):
            q = n * p.omega + s * p.epsilon
            if x_lo <= q <= x_hi:
                out.add(q)
        n += 1
    return sorted(out)


def baselines_in_window(p: ModelParams, x_lo: float, x_hi: float) -> list[Baseline]:
    """Baselines with x_p inside [x_lo, x_hi].

    At epsilon = 0 the plus and minus baselines coincide; only the plus
    member is returned so each spectral position appears once.
    """
    out = []
    n = 0
    while n * p.omega - abs(p.epsilon) <= x_hi:
        branches = (Branch.PLUS,) if p.epsilon == 0.0 else (Branch.PLUS, Branch.MINUS)
        for b in branches:
            bl = Baseline(n, b)
            if x_lo <= bl.x_p(p) <= x_hi:
                out.append(bl)
        n += 1
    return sorted(out, key=lambda b: b.x_p(p))


class PoleProximity(ValueError):
    """x is within pole_guard of a series pole; the regularized path is needed."""

    def __init__(self, n: int, branch: Branch, x: float, pole: float):
        self.n = n
        self.branch = branch
        self.x = x
        self.pole = pole
        super().__init__(
            f"x = {x!r} is within the pole guard of the n = {n} pole "
            f"({pole!r}) of the {branch} series branch")


class ResonantParameters(ValueError):
    """2*epsilon/omega is a nonzero integer; branch poles collide."""


class WindowExhausted(RuntimeError):
    """Automatic window extension hit its ceiling before finding enough zeros."""


class NotExceptional(ValueError):
    """Candidate point does not satisfy the baseline zero condition."""
