"""Rendering of spectrum and constraint-curve figures.

Strictly a consumer of rabispec output files; nothing physical is
recomputed here.  Rendering is deterministic for fixed inputs and
toolchain (Agg backend, pinned hash salt, fixed metadata).
"""
from __future__ import annotations

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .readers import (SchemaError, read_baselines, read_contours,
                      read_exceptional, read_sweep)
from .spec import BRANCH_COLORS, MARKERS, FigureSpec

matplotlib.rcParams["svg.hashsalt"] = "rabiplots"

_PNG_META = {"Software": "rabiplots"}


def _save(fig, output):
    output.parent.mkdir(parents=True, exist_ok=True)
    if output.suffix.lower() == ".png":
        fig.savefig(output, dpi=150, metadata=_PNG_META)
    elif output.suffix.lower() == ".svg":
        fig.savefig(output, metadata={"Date": None})
    else:
        raise SchemaError(f"unsupported output format: {output.suffix}")


def _apply_axes(ax, axes_spec, default_xlabel, default_ylabel):
    ax.set_xlabel(axes_spec.get("xlabel", default_xlabel))
    ax.set_ylabel(axes_spec.get("ylabel", default_ylabel))
    if "xlim" in axes_spec:
        ax.set_xlim(axes_spec["xlim"])
    if "ylim" in axes_spec:
        ax.set_ylim(axes_spec["ylim"])


def render_spectrum(fs: FigureSpec):
    """Level curves over g, baseline parabolas, and classified markers.

    Returns the matplotlib Figure after saving it to fs.output.
    """
    _, sweep = read_sweep(fs.inputs["sweep"])
    _, base = read_baselines(fs.inputs["baselines"])
    points = []
    if "exceptional" in fs.inputs:
        points = read_exceptional(fs.inputs["exceptional"])["points"]

    fig, ax = plt.subplots(figsize=(9, 6))

    levels = {}
    for r in sweep:
        levels.setdefault(r["N"], []).append((r["g"], r["E"]))
    for n in sorted(levels):
        pts = np.array(sorted(levels[n]))
        ax.plot(pts[:, 0], pts[:, 1], color="black", lw=1.0, zorder=2)

    parabolas = {}
    for r in base:
        parabolas.setdefault(r["N"], []).append(
            (r["g"], r["E_plus"], r["E_minus"]))
    for n in sorted(parabolas):
        pts = np.array(sorted(parabolas[n]))
        ax.plot(pts[:, 0], pts[:, 1], color=BRANCH_COLORS["plus"],
                lw=0.8, alpha=0.8, zorder=1)
        ax.plot(pts[:, 0], pts[:, 2], color=BRANCH_COLORS["minus"],
                lw=0.8, alpha=0.8, zorder=1)

    for rec in points:
        ax.scatter([rec["g"]], [rec["energy"]],
                   marker=MARKERS.get(rec["class"], "x"),
                   facecolors="none",
                   edgecolors=BRANCH_COLORS[rec["branch"]],
                   s=70, linewidths=1.4, zorder=3)

    _apply_axes(ax, fs.axes, "g", "E")
    if fs.title:
        ax.set_title(fs.title)
    fig.tight_layout()
    _save(fig, fs.output)
    return fig


def render_curves(fs: FigureSpec):
    """Constraint-curve panels: full zero set solid, S1 subset dashed.

    Returns the matplotlib Figure after saving it to fs.output.
    """
    ncols = int(fs.layout.get("ncols", min(4, len(fs.panels)))) or 1
    nrows = (len(fs.panels) + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols,
                             figsize=(3.2 * ncols, 3.4 * nrows),
                             squeeze=False)
    for k, panel in enumerate(fs.panels):
        ax = axes[k // ncols][k % ncols]
        for path in panel.get("all", []):
            _, branch, polys = read_contours(path)
            for closed, pts in polys:
                arr = np.array(pts)
                ax.plot(arr[:, 0], arr[:, 1], color=BRANCH_COLORS[branch],
                        ls="-", lw=1.0)
        for path in panel.get("s1", []):
            _, branch, polys = read_contours(path)
            for closed, pts in polys:
                arr = np.array(pts)
                ax.plot(arr[:, 0], arr[:, 1], color=BRANCH_COLORS[branch],
                        ls="--", lw=1.2)
        _apply_axes(ax, fs.axes, "delta", "g")
        if panel.get("title"):
            ax.set_title(panel["title"])
    for k in range(len(fs.panels), nrows * ncols):
        axes[k // ncols][k % ncols].set_axis_off()
    if fs.title:
        fig.suptitle(fs.title)
    fig.tight_layout()
    _save(fig, fs.output)
    return fig


def render(fs: FigureSpec):
    return render_spectrum(fs) if fs.kind == "spectrum" else render_curves(fs)


def marker_intersection_errors(sweep_path, baselines_path, exceptional_path):
    """Distance of each marker from the baseline-level intersection.

    For every exceptional point record, measures (a) the gap between the
    marker energy and its baseline parabola interpolated at the marker's g,
    and (b) the gap between the marker energy and the nearest level curve
    interpolated at the same g.  Both should vanish at plot resolution for
    consistent inputs.
    """
    _, sweep = read_sweep(sweep_path)
    _, base = read_baselines(baselines_path)
    points = read_exceptional(exceptional_path)["points"]

    levels = {}
    for r in sweep:
        levels.setdefault(r["N"], []).append((r["g"], r["E"]))
    level_arrays = [np.array(sorted(v)) for v in levels.values()]

    parab = {}
    for r in base:
        key = (r["N"], "plus")
        parab.setdefault(key, []).append((r["g"], r["E_plus"]))
        key = (r["N"], "minus")
        parab.setdefault(key, []).append((r["g"], r["E_minus"]))
    parab = {k: np.array(sorted(v)) for k, v in parab.items()}

    out = []
    for rec in points:
        g, e = rec["g"], rec["energy"]
        key = (rec["N"], rec["branch"])
        base_err = np.inf
        if key in parab:
            arr = parab[key]
            base_err = abs(e - np.interp(g, arr[:, 0], arr[:, 1]))
        level_err = min(abs(e - np.interp(g, arr[:, 0], arr[:, 1]))
                        for arr in level_arrays)
        out.append({"g": g, "energy": e, "class": rec["class"],
                    "baseline_gap": float(base_err),
                    "level_gap": float(level_err)})
    return out
