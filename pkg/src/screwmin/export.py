"""Plain-text writers for curve samples and surface meshes.

Numbers are written with 17 significant digits so doubles round-trip, and
lines end in LF, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import io
import math
from pathlib import Path

import numpy as np

from screwmin import curve2d as c2
from screwmin import surface3d as s3
from screwmin.params import ScrewParams

CURVE_COLUMNS = ("s", "eta", "r", "theta", "kappa", "x", "y")
MESH_FORMATS = ("obj", "ply", "csv")
CHARTS = ("bonnet", "screw", "sphere")


def fmt(x) -> str:
    return format(float(x), ".17g")


def _check_range(lo, hi, what):
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ValueError(f"invalid {what} range {lo}:{hi}")


def _write(text: str, path):
    if path is None:
        return text
    with open(Path(path), "w", newline="\n") as fh:
        fh.write(text)
    return text


def curve_csv(p: ScrewParams, s_range, samples: int) -> str:
    lo, hi = map(float, s_range)
    _check_range(lo, hi, "s")
    if samples < 1:
        raise ValueError("samples must be positive")
    buf = io.StringIO()
    buf.write(",".join(CURVE_COLUMNS) + "\n")
    for s in np.linspace(lo, hi, samples):
        smp = c2.sample(float(s), p)
        row = (smp.s, smp.eta, smp.r, smp.theta, smp.kappa, *smp.position)
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def emit_curve(p: ScrewParams, s_range, samples: int, path=None) -> str:
    """Write the generating curve as CSV; returns the text written."""
    return _write(curve_csv(p, s_range, samples), path)


def chart_for(name: str, p: ScrewParams | None = None, a=None, b=None, radius: float = 1.0):
    """Jet evaluator ``(u, v) -> ChartJet`` for a named chart."""
    if name == "bonnet":
        if a is None or b is None or (a == 0 and b == 0):
            raise ValueError("the bonnet chart needs a and b, not both zero")
        return lambda u, v: s3.bonnet_chart_jet(u, v, a, b)
    if name == "screw":
        if p is None:
            raise ValueError("the screw chart needs gamma0 and omega")
        return lambda t, eta: s3.screw_chart_jet(t, eta, p)
    if name == "sphere":
        return lambda lon, colat: s3.sphere_chart_jet(lon, colat, radius)
    raise ValueError(f"unknown chart {name!r}; choose from {CHARTS}")


def mesh_text(mesh: s3.Mesh, fmt_name: str) -> str:
    buf = io.StringIO()
    V, F, H = mesh.vertices, mesh.faces, mesh.mean_curvature_abs
    if fmt_name == "obj":
        for x in V:
            buf.write("v " + " ".join(fmt(c) for c in x) + "\n")
        for f in F:
            buf.write("f " + " ".join(str(int(i) + 1) for i in f) + "\n")
    elif fmt_name == "ply":
        buf.write("ply\nformat ascii 1.0\n")
        buf.write(f"element vertex {len(V)}\n")
        buf.write("property double x\nproperty double y\nproperty double z\n")
        buf.write("property double mean_curvature_abs\n")
        buf.write(f"element face {len(F)}\nproperty list uchar int vertex_indices\nend_header\n")
        for x, h in zip(V, H):
            buf.write(" ".join(fmt(c) for c in (*x, h)) + "\n")
        for f in F:
            buf.write("3 " + " ".join(str(int(i)) for i in f) + "\n")
    elif fmt_name == "csv":
        buf.write("x,y,z,mean_curvature_abs\n")
        for x, h in zip(V, H):
            buf.write(",".join(fmt(c) for c in (*x, h)) + "\n")
    else:
        raise ValueError(f"unknown mesh format {fmt_name!r}; choose from {MESH_FORMATS}")
    return buf.getvalue()


def emit_mesh(chart, u_range, v_range, resolution, fmt_name: str = "obj", path=None):
    """Triangulate ``chart`` and write it; returns ``(mesh, text)``.

    ``resolution`` is an int or an ``(nu, nv)`` pair. The csv format lists
    vertices only (row-major), with |H| per vertex.
    """
    if fmt_name not in MESH_FORMATS:
        raise ValueError(f"unknown mesh format {fmt_name!r}; choose from {MESH_FORMATS}")
    nu, nv = (resolution, resolution) if np.ndim(resolution) == 0 else resolution
    _check_range(*u_range, "u")
    _check_range(*v_range, "v")
    mesh = s3.export_mesh(chart, u_range, v_range, int(nu), int(nv))
    return mesh, _write(mesh_text(mesh, fmt_name), path)
