"""Figure rendering for rabispec output files (spectra and constraint curves)."""

from .readers import SchemaError, read_baselines, read_contours, \
    read_exceptional, read_sweep
from .render import (marker_intersection_errors, render, render_curves,
                     render_spectrum)
from .spec import BRANCH_COLORS, MARKERS, FigureSpec, load_figure_spec

__version__ = "0.1.0"

__all__ = [
    "SchemaError", "FigureSpec", "load_figure_spec",
    "render", "render_spectrum", "render_curves",
    "marker_intersection_errors",
    "read_sweep", "read_baselines", "read_contours", "read_exceptional",
    "MARKERS", "BRANCH_COLORS",
]
