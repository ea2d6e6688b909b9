import numpy as np
import pytest

from rabispec import ModelParams, Truncation


@pytest.fixture
def figure_params():
    """The working point used throughout: omega=1, delta=1.2, epsilon=0.3."""
    return ModelParams(omega=1.0, g=0.7, delta=1.2, epsilon=0.3)


@pytest.fixture
def trunc():
    return Truncation()


def random_offpole_points(p, rng, x_lo, x_hi, n, guard=1e-3):
    """x samples at least `guard` away from every pole in the window."""
    from rabispec.model import pole_positions
    poles = np.array(pole_positions(p, x_lo - 1, x_hi + 1))
    out = []
    while len(out) < n:
        x = rng.uniform(x_lo, x_hi)
        if poles.size == 0 or np.min(np.abs(poles - x)) > guard:
            out.append(x)
    return np.array(out)
