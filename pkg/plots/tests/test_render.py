"""Rendering tests against real emitted data."""
import json
import subprocess
import sys

import pytest

from rabiplots import (SchemaError, load_figure_spec,
                       marker_intersection_errors, render_curves,
                       render_spectrum)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def write_spec(path, doc):
    path.write_text(json.dumps(doc, indent=1))
    return path


def spectrum_spec(data_dir, out_name="spectrum.png", extra=None):
    doc = {
        "kind": "spectrum",
        "inputs": {"sweep": "sweep.csv", "baselines": "sweep_baselines.csv",
                   "exceptional": "points.json"},
        "output": out_name,
        "axes": {"xlabel": "g", "ylabel": "E"},
    }
    if extra:
        doc.update(extra)
    return write_spec(data_dir / "fig_spectrum.json", doc)


def curves_spec(data_dir, out_name="curves.png"):
    doc = {
        "kind": "curves",
        "panels": [
            {"all": ["biased_1+_all.csv", "biased_1-_all.csv"],
             "s1": ["biased_1+_s1.csv", "biased_1-_s1.csv"],
             "title": "N=1, biased"},
            {"all": "symmetric_1+_all.csv", "s1": "symmetric_1+_s1.csv",
             "title": "N=1, symmetric"},
        ],
        "layout": {"ncols": 2},
        "output": out_name,
    }
    return write_spec(data_dir / "fig_curves.json", doc)


def four_panel_spec(data_dir, out_name="panels.png"):
    doc = {
        "kind": "curves",
        "panels": [{"all": f"symmetric_{n}+_all.csv",
                    "s1": f"symmetric_{n}+_s1.csv",
                    "title": f"N={n}"} for n in range(4)],
        "layout": {"ncols": 4},
        "output": out_name,
    }
    return write_spec(data_dir / "fig_panels.json", doc)


def test_render_spectrum_writes_png(data_dir):
    fs = load_figure_spec(spectrum_spec(data_dir))
    fig = render_spectrum(fs)
    out = data_dir / "spectrum.png"
    assert out.exists()
    assert out.read_bytes()[:8] == PNG_MAGIC
    assert out.stat().st_size > 10_000
    # levels drawn as black lines, both baseline families present
    colors = {ln.get_color() for ln in fig.axes[0].lines}
    assert {"black", "tab:blue", "tab:red"} <= colors
    # markers: circles for S1, squares for S2, branch-colored edges
    kinds = {}
    for coll in fig.axes[0].collections:
        n = len(coll.get_offsets())
        path_len = len(coll.get_paths()[0].vertices)
        kinds[path_len] = kinds.get(path_len, 0) + n
    assert sum(kinds.values()) == 10  # 4 S1 + 6 S2 records for N=1,2 windows


def test_spectrum_markers_sit_on_baseline_level_intersections(data_dir):
    errs = marker_intersection_errors(data_dir / "sweep.csv",
                                      data_dir / "sweep_baselines.csv",
                                      data_dir / "points.json")
    assert len(errs) == 10
    assert max(e["baseline_gap"] for e in errs) < 2e-3
    assert max(e["level_gap"] for e in errs) < 1.5e-2


def test_render_is_deterministic(data_dir):
    fs1 = load_figure_spec(spectrum_spec(data_dir, "det1.png"))
    fs2 = load_figure_spec(spectrum_spec(data_dir, "det2.png"))
    render_spectrum(fs1)
    render_spectrum(fs2)
    assert (data_dir / "det1.png").read_bytes() == \
        (data_dir / "det2.png").read_bytes()


def test_render_curves_conventions(data_dir):
    fs = load_figure_spec(curves_spec(data_dir))
    fig = render_curves(fs)
    assert (data_dir / "curves.png").exists()
    ax = fig.axes[0]  # biased panel: both branches, solid and dashed
    styles = {(ln.get_color(), ln.get_linestyle()) for ln in ax.lines}
    assert ("tab:blue", "-") in styles and ("tab:red", "-") in styles
    assert ("tab:blue", "--") in styles  # S1 subset dashed
    ax1 = fig.axes[1]
    assert any(ln.get_linestyle() == "--" for ln in ax1.lines)


def test_four_panel_figure(data_dir):
    fs = load_figure_spec(four_panel_spec(data_dir))
    fig = render_curves(fs)
    assert (data_dir / "panels.png").exists()
    assert len(fig.axes) == 4
    # N=0 has no constraint-polynomial curves: its dashed set is empty
    n0 = fig.axes[0]
    assert not any(ln.get_linestyle() == "--" for ln in n0.lines)
    assert any(ln.get_linestyle() == "-" for ln in n0.lines)
    # higher N panels do carry dashed S1 loops
    assert any(ln.get_linestyle() == "--" for ln in fig.axes[1].lines)


def test_empty_exceptional_renders_plain_spectrum(data_dir):
    empty = data_dir / "empty.json"
    empty.write_text(json.dumps({"metadata": {}, "points": [],
                                 "s2_counts": {}}))
    doc = {"kind": "spectrum",
           "inputs": {"sweep": "sweep.csv",
                      "baselines": "sweep_baselines.csv",
                      "exceptional": "empty.json"},
           "output": "plain.png"}
    fs = load_figure_spec(write_spec(data_dir / "fig_plain.json", doc))
    fig = render_spectrum(fs)
    assert (data_dir / "plain.png").exists()
    assert sum(len(c.get_offsets()) for c in fig.axes[0].collections) == 0


def test_svg_output(data_dir):
    fs = load_figure_spec(spectrum_spec(data_dir, "spectrum.svg"))
    render_spectrum(fs)
    out = data_dir / "spectrum.svg"
    assert out.exists()
    assert b"<svg" in out.read_bytes()[:300]


def test_schema_mismatch_aborts(data_dir, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    doc = {"kind": "spectrum",
           "inputs": {"sweep": str(bad),
                      "baselines": str(data_dir / "sweep_baselines.csv")},
           "output": str(tmp_path / "x.png")}
    fs = load_figure_spec(write_spec(tmp_path / "fig.json", doc))
    with pytest.raises(SchemaError):
        render_spectrum(fs)


def test_missing_input_rejected_at_spec_load(data_dir, tmp_path):
    doc = {"kind": "spectrum",
           "inputs": {"sweep": "nope.csv", "baselines": "missing.csv"},
           "output": "x.png"}
    with pytest.raises(SchemaError):
        load_figure_spec(write_spec(tmp_path / "fig.json", doc))


def test_command_line_entry(data_dir):
    spec = spectrum_spec(data_dir, "cli_out.png")
    proc = subprocess.run([sys.executable, "-m", "rabiplots",
                           "--spec", str(spec)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (data_dir / "cli_out.png").exists()
    proc = subprocess.run([sys.executable, "-m", "rabiplots",
                           "--spec", str(data_dir / "does_not_exist.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 2
