"""Command-line front end.

Subcommands: spectrum | exceptional | curves | oracle-check.  All data
emission is deterministic: a config echo rides in '#'-comment metadata
lines (CSV) or a "metadata" object (JSON), never timestamps.  Exit codes:
0 ok, 1 flagged non-convergence or failed cross-check, 2 validation error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .curves import emit_figure
from .exceptional import find_s1, find_s2, point_record
from .model import ModelParams, Truncation, baseline_from_label, branch_from_str
from .oracle import cutoff_agreement, oracle_energies
from .spectrum import (format_float, sweep_spectrum, write_baseline_csv,
                       write_sweep_csv, sweep_rows, SWEEP_HEADER)


def parse_range(text: str, name: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"{name} expects lo:hi:steps, got {text!r}")
    lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if steps < 2:
        raise ValueError(f"{name}: steps must be >= 2, got {steps}")
    if not lo < hi:
        raise ValueError(f"{name}: need lo < hi, got {text!r}")
    return lo, hi, steps


def parse_window(text: str, name: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"{name} expects lo:hi, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if not lo < hi:
        raise ValueError(f"{name}: need lo < hi, got {text!r}")
    return lo, hi


def add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--epsilon", type=float, default=0.0)
    sp.add_argument("--nmax", type=int, default=200)
    sp.add_argument("--tail-tol", type=float, default=1e-14)
    sp.add_argument("--out", type=str, required=True)
    sp.add_argument("--format", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rabispec",
        description="G-function spectra and exceptional points of the "
                    "generalized quantum Rabi model")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("spectrum", help="sweep energy levels over g")
    add_common(sp)
    sp.add_argument("--g", type=str, required=True, metavar="LO:HI:STEPS")
    sp.add_argument("--levels", type=int, default=8)
    sp.add_argument("--baseline-rows", type=int, default=4,
                    help="N range for the analytic baseline table")
    sp.add_argument("--oracle-check", type=int, default=None, metavar="M",
                    help="append |E - oracle| column using Fock cutoff M")
    sp.add_argument("--allow-flagged", action="store_true")

    ep = sub.add_parser("exceptional", help="locate S1/S2 baseline points")
    add_common(ep)
    ep.add_argument("--n", type=str, default="1,2,3,4",
                    help="comma list of baseline N values")
    ep.add_argument("--branches", type=str, default="plus,minus")
    ep.add_argument("--g-window", type=str, default="0.0125:5",
                    metavar="LO:HI")
    ep.add_argument("--grid", type=int, default=401)
    ep.add_argument("--cutoff", type=int, default=None)
    ep.add_argument("--no-verify", action="store_true")

    cp = sub.add_parser("curves", help="trace constraint curves in the "
                                       "delta-g plane")
    cp.add_argument("--omega", type=float, default=1.0)
    cp.add_argument("--epsilon", type=float, default=0.0)
    cp.add_argument("--nmax", type=int, default=200)
    cp.add_argument("--tail-tol", type=float, default=1e-14)
    cp.add_argument("--out", type=str, required=True,
                    help="output path prefix")
    cp.add_argument("--baselines", type=str, required=True,
                    help="comma list of baseline labels like 1+,2-")
    cp.add_argument("--delta-range", type=str, default="0:6:600",
                    metavar="LO:HI:STEPS")
    cp.add_argument("--g-range", type=str, default="0.02:3:600",
                    metavar="LO:HI:STEPS")
    cp.add_argument("--fields", type=str, default="all,s1",
                    help="comma subset of {all,s1}")

    oc = sub.add_parser("oracle-check", help="cross-validation report")
    oc.add_argument("--omega", type=float, default=1.0)
    oc.add_argument("--delta", type=float, required=True)
    oc.add_argument("--epsilon", type=float, default=0.0)
    oc.add_argument("--nmax", type=int, default=200)
    oc.add_argument("--tail-tol", type=float, default=1e-14)
    oc.add_argument("--g", type=str, default="0.1:1.0:10", metavar="LO:HI:STEPS")
    oc.add_argument("--levels", type=int, default=6)
    oc.add_argument("--cutoff", type=int, default=60)
    oc.add_argument("--tolerance", type=float, default=1e-6)
    return ap


def _truncation(args) -> Truncation:
    return Truncation(n_max=args.nmax, tail_tol=args.tail_tol)


def _meta(args, keys) -> dict:
    return {k: getattr(args, k.replace("-", "_")) for k in keys}


def cmd_spectrum(args) -> int:
    g_lo, g_hi, steps = parse_range(args.g, "--g")
    if args.levels < 1:
        raise ValueError("--levels must be >= 1")
    p = ModelParams(args.omega, g_lo, args.delta, args.epsilon)
    t = _truncation(args)
    sweep = sweep_spectrum(p, g_lo, g_hi, steps, args.levels, t)
    meta = {"command": "spectrum", "omega": args.omega, "delta": args.delta,
            "epsilon": args.epsilon, "g": args.g, "levels": args.levels,
            "nmax": args.nmax, "tail_tol": args.tail_tol}
    oracle_dev = None
    if args.oracle_check is not None:
        meta["oracle_cutoff"] = args.oracle_check
        oracle_dev = []
        for i, g in enumerate(sweep.g_values):
            pe = p.replace(g=float(g))
            ev = oracle_energies(pe, args.oracle_check, count=args.levels)
            scan = np.array([q.energy for q in sweep.levels[i][:args.levels]])
            dev = np.abs(scan - ev[:len(scan)])
            oracle_dev.append(list(dev) + [np.nan] * (args.levels - len(scan)))

    fmt = args.format or "csv"
    out = Path(args.out)
    if fmt == "csv":
        write_sweep_csv(sweep, out, meta, oracle_dev)
        write_baseline_csv(sweep, out.with_name(out.stem + "_baselines" + out.suffix),
                           args.baseline_rows, meta)
    else:
        header = list(SWEEP_HEADER) + (["oracle_dE"] if oracle_dev else [])
        rows = [dict(zip(header, r)) for r in sweep_rows(sweep, oracle_dev)]
        base = [{"g": format_float(float(g)), "N": n,
                 "E_plus": format_float(n * sweep.omega - float(g) ** 2 / sweep.omega
                                        + sweep.epsilon),
                 "E_minus": format_float(n * sweep.omega - float(g) ** 2 / sweep.omega
                                         - sweep.epsilon)}
                for g in sweep.g_values for n in range(args.baseline_rows + 1)]
        out.write_text(json.dumps({"metadata": meta, "rows": rows,
                                   "baselines": base}, indent=1) + "\n")

    flagged = any(t for t in sweep.truncated) or any(
        not q.converged for col in sweep.levels for q in col)
    if flagged and not args.allow_flagged:
        print("warning: non-converged or truncated entries present",
              file=sys.stderr)
        return 1
    return 0


def cmd_exceptional(args) -> int:
    g_lo, g_hi = parse_window(args.g_window, "--g-window")
    if g_lo <= 0:
        raise ValueError("--g-window must start above 0")
    ns = [int(s) for s in args.n.split(",") if s.strip()]
    branches = [branch_from_str(s) for s in args.branches.split(",") if s.strip()]
    p = ModelParams(args.omega, max(g_lo, 0.1), args.delta, args.epsilon)
    t = _truncation(args)
    from .model import Baseline
    points = []
    s2_counts = {}
    for n in ns:
        for br in branches:
            b = Baseline(n, br)
            s1 = find_s1(b, args.delta, g_lo, g_hi, p, t,
                         verify=not args.no_verify, cutoff=args.cutoff,
                         grid_points=args.grid)
            s2 = find_s2(b, args.delta, g_lo, g_hi, p, t,
                         verify=not args.no_verify, cutoff=args.cutoff,
                         grid_points=args.grid)
            points.extend(s1 + s2)
            s2_counts[b.label()] = len([q for q in s2 if q.kind == "S2"])
    meta = {"command": "exceptional", "omega": args.omega, "delta": args.delta,
            "epsilon": args.epsilon, "n": args.n, "branches": args.branches,
            "g_window": args.g_window, "grid": args.grid,
            "nmax": args.nmax, "tail_tol": args.tail_tol}
    records = [point_record(q) for q in points]
    fmt = args.format or "json"
    out = Path(args.out)
    if fmt == "json":
        out.write_text(json.dumps({"metadata": meta, "points": records,
                                   "s2_counts": s2_counts}, indent=1) + "\n")
    else:
        import csv as _csv
        import io
        buf = io.StringIO()
        for k, v in meta.items():
            buf.write(f"# {k}={v}\n")
        w = _csv.writer(buf, lineterminator="\n")
        cols = ["N", "branch", "delta", "g", "x_p", "energy", "class",
                "constraint_value"]
        w.writerow(cols)
        for r in records:
            w.writerow([r[c] if c not in ("delta", "g", "x_p", "energy",
                                          "constraint_value")
                        else format_float(r[c]) for c in cols])
        out.write_text(buf.getvalue())
    ambiguous = [r for r in records if r["class"] == "ambiguous"
                 or r.get("greg_ambiguous")]
    return 1 if ambiguous else 0


def cmd_curves(args) -> int:
    d_lo, d_hi, d_steps = parse_range(args.delta_range, "--delta-range")
    g_lo, g_hi, g_steps = parse_range(args.g_range, "--g-range")
    if g_lo <= 0:
        raise ValueError("--g-range must start above 0")
    baselines = [baseline_from_label(s) for s in args.baselines.split(",")
                 if s.strip()]
    field_map = {"all": "greg", "s1": "constraint"}
    fields = []
    for name in args.fields.split(","):
        name = name.strip()
        if name not in field_map:
            raise ValueError(f"unknown field {name!r} (expected all,s1)")
        fields.append(field_map[name])
    p = ModelParams(args.omega, 1.0, 1.0, args.epsilon)
    t = _truncation(args)
    meta = {"command": "curves", "omega": args.omega, "epsilon": args.epsilon,
            "nmax": args.nmax, "tail_tol": args.tail_tol}
    written = emit_figure(baselines, args.out, p,
                          delta_range=(d_lo, d_hi), g_range=(g_lo, g_hi),
                          resolution=(d_steps, g_steps), t=t,
                          fields=tuple(fields), metadata=meta)
    for path in written:
        print(path)
    return 0


def cmd_oracle_check(args) -> int:
    g_lo, g_hi, steps = parse_range(args.g, "--g")
    t = _truncation(args)
    p0 = ModelParams(args.omega, g_lo, args.delta, args.epsilon)
    from .spectrum import energy_levels
    ok = True
    lines = []

    worst = 0.0
    for g in np.linspace(g_lo, g_hi, steps):
        pe = p0.replace(g=float(g))
        scan = np.array([q.energy for q in energy_levels(pe, args.levels, t)])
        ev = oracle_energies(pe, args.cutoff, count=args.levels)
        worst = max(worst, float(np.max(np.abs(scan - ev))))
    passed = worst < args.tolerance
    ok &= passed
    lines.append(f"spectrum equivalence: max|dE| = {worst:.3e} "
                 f"{'PASS' if passed else 'FAIL'}")

    g_mid = 0.5 * (g_lo + g_hi)
    base = oracle_energies(p0.replace(g=g_mid), args.cutoff)
    sym_worst = 0.0
    for q in (p0.replace(g=g_mid, epsilon=-args.epsilon),
              p0.replace(g=-g_mid),
              p0.replace(g=g_mid, delta=-args.delta)):
        ev = oracle_energies(q, args.cutoff)
        sym_worst = max(sym_worst, float(np.max(np.abs(ev - base))))
    passed = sym_worst < 1e-10
    ok &= passed
    lines.append(f"symmetry invariance: max|dE| = {sym_worst:.3e} "
                 f"{'PASS' if passed else 'FAIL'}")

    conv = cutoff_agreement(p0.replace(g=g_hi), args.cutoff, args.levels)
    passed = conv < 1e-9
    ok &= passed
    lines.append(f"cutoff convergence (M={args.cutoff} vs +20): "
                 f"max|dE| = {conv:.3e} {'PASS' if passed else 'FAIL'}")

    for ln in lines:
        print(ln)
    print("oracle-check:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    handlers = {"spectrum": cmd_spectrum, "exceptional": cmd_exceptional,
                "curves": cmd_curves, "oracle-check": cmd_oracle_check}
    try:
        return handlers[args.cmd](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
