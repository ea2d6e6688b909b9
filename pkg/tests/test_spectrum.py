"""Zero scanning, level extraction, sweeps, and the sweep CSV round-trip."""
import math

import numpy as np
import pytest

from rabispec import (ModelParams, Truncation, WindowExhausted, energy_levels,
                      scan_zeros, sweep_spectrum)
from rabispec.oracle import oracle_energies
from rabispec.spectrum import (continuity_gaps, read_sweep_csv,
                               write_sweep_csv, write_baseline_csv)


def test_displaced_oscillator_ladder_doubly_degenerate():
    p = ModelParams(1.0, 0.5, 0.0, 0.0)
    pts = scan_zeros(p, -0.6, 4.4)
    xs = [q.x for q in pts]
    assert xs == pytest.approx([0, 0, 1, 1, 2, 2, 3, 3, 4, 4], abs=1e-9)
    for q in pts:
        assert q.on_baseline is not None
        assert q.energy == q.x - 0.25


def test_energies_match_oracle(figure_params):
    p = figure_params
    pts = scan_zeros(p, -2.0, 5.0)
    E = np.array([q.energy for q in pts])
    ev = oracle_energies(p, 60)
    ev = ev[(ev > -2.0 - p.g ** 2) & (ev < 5.0 - p.g ** 2)]
    assert len(E) == len(ev)
    assert np.max(np.abs(E - ev)) < 1e-6


def test_small_coupling_tracks_analytic_limit():
    # at g -> 0 the levels go to n*omega +/- sqrt(delta^2 + eps^2)
    p = ModelParams(1.0, 0.05, 1.2, 0.3)
    r = math.hypot(1.2, 0.3)
    pts = energy_levels(p, 2)
    assert pts[0].energy == pytest.approx(-r, abs=5e-3)
    assert pts[1].energy == pytest.approx(1.0 - r, abs=5e-3)


def test_ordering_and_indices(figure_params):
    pts = scan_zeros(figure_params, -2.0, 5.0)
    assert [q.index for q in pts] == list(range(len(pts)))
    xs = [q.x for q in pts]
    assert all(a <= b for a, b in zip(xs, xs[1:]))


def test_s1_double_appears_twice_at_zero_bias():
    # Juddian point of the symmetric model: delta=0.6, g=0.4, E=0.84 twice
    p = ModelParams(1.0, 0.4, 0.6, 0.0)
    pts = scan_zeros(p, 0.5, 1.5)
    at = [q for q in pts if abs(q.x - 1.0) < 1e-9]
    assert len(at) == 2
    assert at[0].index + 1 == at[1].index
    assert all(q.on_baseline is not None for q in at)


def test_monotone_window_growth(figure_params):
    p = figure_params
    small = scan_zeros(p, -1.0, 2.0)
    large = scan_zeros(p, -2.0, 5.0)
    xs_small = [round(q.x, 9) for q in small]
    xs_large = [round(q.x, 9) for q in large]
    for x in xs_small:
        assert x in xs_large


def test_energy_levels_count_and_window_exhausted(figure_params):
    pts = energy_levels(figure_params, 4)
    assert len(pts) == 4
    assert [q.index for q in pts] == [0, 1, 2, 3]
    with pytest.raises(WindowExhausted):
        energy_levels(figure_params, 4000, max_span=5.0)


def test_scan_validates_grid_step(figure_params):
    with pytest.raises(ValueError):
        scan_zeros(figure_params, 0.0, 1.0, grid_step=0.2)
    with pytest.raises(ValueError):
        scan_zeros(figure_params, 2.0, 1.0)


def test_sweep_shape_and_continuity():
    p = ModelParams(1.0, 0.3, 1.2, 0.3)
    sweep = sweep_spectrum(p, 0.1, 0.8, 15, 5)
    assert sweep.energies().shape == (15, 5)
    assert not any(sweep.truncated)
    assert continuity_gaps(sweep) < 1.0
    # analytic baseline columns
    bl = sweep.baseline_energy(1, +1)
    assert bl[0] == pytest.approx(1.0 - 0.1 ** 2 + 0.3)


def test_sweep_csv_roundtrip(tmp_path):
    p = ModelParams(1.0, 0.3, 1.2, 0.3)
    sweep = sweep_spectrum(p, 0.2, 0.4, 3, 3)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(sweep, path, {"omega": 1.0, "delta": 1.2})
    meta, rows = read_sweep_csv(path)
    assert meta["omega"] == "1.0"
    assert len(rows) == 9
    first = rows[0]
    assert set(first) == {"g", "N", "x", "E", "on_baseline"}
    assert float(first["E"]) == pytest.approx(sweep.levels[0][0].energy)
    # byte-identical on rewrite
    path2 = tmp_path / "sweep2.csv"
    write_sweep_csv(sweep, path2, {"omega": 1.0, "delta": 1.2})
    assert path.read_bytes() == path2.read_bytes()


def test_baseline_csv(tmp_path):
    p = ModelParams(1.0, 0.3, 1.2, 0.3)
    sweep = sweep_spectrum(p, 0.2, 0.4, 3, 2)
    path = tmp_path / "base.csv"
    write_baseline_csv(sweep, path, 2, {"k": "v"})
    text = path.read_text().splitlines()
    assert text[0] == "# k=v"
    assert text[1] == "g,N,E_plus,E_minus"
    assert len(text) == 2 + 3 * 3


def test_zero_bias_sweep_merges_baseline_families():
    p = ModelParams(1.0, 0.3, 1.2, 0.0)
    sweep = sweep_spectrum(p, 0.2, 0.4, 3, 2)
    assert np.allclose(sweep.baseline_energy(1, +1), sweep.baseline_energy(1, -1))
