"""Command-line front end.

Exit codes: 0 when every check behaves as expected, 1 when a check does
not, 2 for usage errors (bad flags or invalid parameters).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from screwmin import __version__
from screwmin import curve2d as c2
from screwmin import export
from screwmin import highdim as hd
from screwmin.params import ScrewParams, derive_constants
from screwmin.report import SUITES, SuiteParams, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise argparse.ArgumentTypeError(f"invalid range {text!r}")
    return lo, hi


def _screw_args(sp):
    sp.add_argument("--gamma0", type=float, default=1.0)
    sp.add_argument("--omega", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="screwmin", description="Screw-motion minimal surfaces: samples, meshes and residual checks."
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("curve", help="sample the generating curve as CSV")
    _screw_args(c)
    c.add_argument("--s-range", type=parse_range, default=(-5.0, 5.0), metavar="LO:HI")
    c.add_argument("--samples", type=int, default=101)
    c.add_argument("--out")

    m = sub.add_parser("mesh", help="triangulate a chart (obj, ply or csv)")
    m.add_argument("--chart", choices=export.CHARTS, default="bonnet")
    _screw_args(m)
    m.add_argument("--a", type=float)
    m.add_argument("--b", type=float)
    m.add_argument("--u-range", type=parse_range, default=(-1.0, 1.0), metavar="LO:HI")
    m.add_argument("--v-range", type=parse_range, default=(0.0, 2 * math.pi), metavar="LO:HI")
    m.add_argument("--samples", type=int, default=50, help="grid points per direction")
    m.add_argument("--format", choices=export.MESH_FORMATS, default="obj")
    m.add_argument("--out")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=SUITES, default="all")
    _screw_args(v)
    v.add_argument("--a", type=float)
    v.add_argument("--b", type=float)
    v.add_argument("--p", type=int, default=1)
    v.add_argument("--q", type=int, default=2)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--h", type=float, default=hd.DEFAULT_H)
    v.add_argument("--json", action="store_true", help="print the JSON report instead of a table")
    v.add_argument("--out", help="also write the JSON report here")

    r = sub.add_parser("roots", help="self-intersections of the generating curve")
    _screw_args(r)
    r.add_argument("--samples", type=int, default=3, help="number of roots")
    r.add_argument("--json", action="store_true")

    h = sub.add_parser("highdim", help="sphere-product Monte Carlo probe")
    h.add_argument("--p", type=int, default=1)
    h.add_argument("--q", type=int, default=2)
    h.add_argument("--samples", type=int, default=1000, help="random draws")
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--h", type=float, default=hd.DEFAULT_H)
    h.add_argument("--json", action="store_true")
    return ap


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def cmd_curve(args) -> int:
    p = ScrewParams(args.gamma0, args.omega)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    _emit(export.curve_csv(p, args.s_range, args.samples), args.out)
    return EXIT_OK


def cmd_mesh(args) -> int:
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    if args.chart == "bonnet":
        if args.a is None and args.b is None:
            dc = derive_constants(ScrewParams(args.gamma0, args.omega))
            a, b = dc.a, dc.b
        else:
            a, b = args.a, args.b
        chart = export.chart_for("bonnet", a=a, b=b)
    else:
        chart = export.chart_for(args.chart, p=ScrewParams(args.gamma0, args.omega))
    _, text = export.emit_mesh(chart, args.u_range, args.v_range, args.samples, args.format)
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    sp = SuiteParams(args.gamma0, args.omega, args.a, args.b, args.p, args.q, args.seed, args.h)
    report = run_suite(args.suite, sp)
    text = report.to_json()
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        print("\n".join(report.summary_lines()))
        print("suite", args.suite, "PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_roots(args) -> int:
    p = ScrewParams(args.gamma0, args.omega)
    roots = c2.self_intersections(p, args.samples)
    rows = [
        {"eta": r.eta, "residual": r.residual, "coincidence": r.coincidence, "axis_offset": r.axis_offset}
        for r in roots
    ]
    ok = all(r.residual <= 1e-12 and r.coincidence <= 1e-10 and r.axis_offset <= 1e-10 for r in roots)
    if args.json:
        print(json.dumps({"gamma0": p.gamma0, "omega": p.omega, "roots": rows}, indent=2))
    else:
        print("eta,residual,coincidence,axis_offset")
        for row in rows:
            print(",".join(export.fmt(v) for v in row.values()))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_highdim(args) -> int:
    if args.p < 1 or args.q < 1 or args.samples < 1:
        raise UsageError("--p, --q and --samples must be positive")
    rng = np.random.default_rng(args.seed)
    res = []
    for _ in range(args.samples):
        B = rng.uniform(-1, 1, (args.p + 1, args.q + 1))
        theta = rng.uniform(0.2, math.pi - 0.2, args.p)
        phi = rng.uniform(0.2, math.pi - 0.2, args.q)
        res.append(abs(hd.sphere_product_residual(args.p, args.q, B, theta, phi, args.h).residual))
    res = np.array(res)
    out = {
        "p": args.p,
        "q": args.q,
        "seed": args.seed,
        "draws": args.samples,
        "fraction_above_1e-3": float(np.mean(res >= 1e-3)),
        "min_residual": float(res.min()),
        "median_residual": float(np.median(res)),
    }
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        for k, val in out.items():
            print(f"{k}: {val}")
    return EXIT_OK


COMMANDS = {"curve": cmd_curve, "mesh": cmd_mesh, "verify": cmd_verify, "roots": cmd_roots, "highdim": cmd_highdim}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as e:
        print(f"screwmin {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
