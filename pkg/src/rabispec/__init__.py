"""Eigenspectra and exceptional points of the generalized quantum Rabi model.

The spectral condition is the vanishing of a transcendental function built
from two recursively defined power series; multiplying by a pole-cancelling
product turns it into a function that is finite and scannable through the
exceptional baselines E = N*omega - g^2/omega +/- epsilon.  An independent
truncated-Fock diagonalization (cyclic Jacobi) cross-checks everything.
"""

from .model import (Baseline, Branch, ModelParams, NotExceptional,
                    PoleProximity, ResonantParameters, Truncation,
                    WindowExhausted, baseline_from_label)
from .series import SeriesValue, f_coeff, k_sequence, r_series, rbar_series
from .gfunction import (BaselineValue, GValue, SignedLog, g_eps, g_reg,
                        g_reg_at_baseline, signedlog_product)
from .spectrum import (SpectralPoint, SpectrumSweep, energy_levels,
                       scan_zeros, sweep_spectrum)
from .exceptional import (ExceptionalPoint, OracleCheck, classify,
                          constraint_value, find_s1, find_s2)
from .curves import (ContourSet, PlaneGrid, emit_figure, intersect_with_delta,
                     sample_plane, trace_contours)
from .oracle import (DenseSymmetric, EigenResult, build_hamiltonian,
                     cutoff_agreement, eigenvalues, oracle_energies,
                     recommended_cutoff)

__version__ = "0.1.0"

__all__ = [
    "Baseline", "Branch", "ModelParams", "Truncation",
    "PoleProximity", "ResonantParameters", "WindowExhausted", "NotExceptional",
    "SeriesValue", "f_coeff", "k_sequence", "r_series", "rbar_series",
    "SignedLog", "GValue", "BaselineValue", "g_eps", "g_reg",
    "g_reg_at_baseline", "signedlog_product",
    "SpectralPoint", "SpectrumSweep", "scan_zeros", "energy_levels",
    "sweep_spectrum",
    "ExceptionalPoint", "OracleCheck", "constraint_value", "find_s1",
    "find_s2", "classify",
    "PlaneGrid", "ContourSet", "sample_plane", "trace_contours",
    "emit_figure", "intersect_with_delta",
    "DenseSymmetric", "EigenResult", "build_hamiltonian", "eigenvalues",
    "oracle_energies", "recommended_cutoff", "cutoff_agreement",
    "baseline_from_label",
]
