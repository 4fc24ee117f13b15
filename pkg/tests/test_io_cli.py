import json
import math

import numpy as np
import pytest

from screwmin import cli, export
from screwmin import curve2d as c2
from screwmin import highdim as hd
from screwmin.params import ScrewParams
from screwmin.report import Check, ResidualReport, SuiteParams, make_check, run_suite


# -- reports -------------------------------------------------------------------


@pytest.fixture(scope="module")
def curve_report():
    return run_suite("curve", SuiteParams(1.0, 1.0))


def test_curve_suite_passes(curve_report):
    assert curve_report.passed
    assert curve_report.failures() == []
    assert any(c.category == "expected-nonzero" for c in curve_report.checks)


def test_surface_suite_helicoid():
    rep = run_suite("surface", SuiteParams(a=1.0, b=0.0))
    assert rep.passed
    mc = [c for c in rep.checks if "mean_curvature" in c.name]
    assert mc and all(c.max_residual <= 1e-10 for c in mc)


def test_highdim_negative_control_semantics():
    rep = run_suite("highdim", SuiteParams(p=1, q=2, seed=0))
    sp = next(c for c in rep.checks if c.name == "sphere_product")
    assert sp.category == "expected-nonzero"
    assert not sp.passed and sp.as_expected
    assert rep.passed


def test_report_round_trip(curve_report):
    text = curve_report.to_json()
    back = ResidualReport.from_json(text)
    assert back == curve_report
    assert back.to_json() == text
    assert json.loads(text)["schema"] == 1


def test_report_schema_rejected(curve_report):
    d = json.loads(curve_report.to_json())
    d["schema"] = 2
    with pytest.raises(ValueError, match="schema"):
        ResidualReport.from_json(json.dumps(d))


def test_report_rerunnable(curve_report):
    sp = SuiteParams(**curve_report.params)
    assert run_suite("curve", sp).to_json() == curve_report.to_json()


def test_report_numbers_reproducible(curve_report):
    # a listed residual is recomputed from the recorded parameters
    chk = next(c for c in curve_report.checks if c.name == "curvature_hyperbola")
    p = SuiteParams(**curve_report.params).screw()
    s = np.linspace(-10, 10, 1000)
    assert float(np.max(np.abs(c2.hyperbola_residual(s, p)))) == chk.max_residual


def test_pass_flag_matches_tolerance():
    assert make_check("x", "id", 1e-9, 1e-8, "g").passed
    assert not make_check("x", "id", 1e-7, 1e-8, "g").passed
    assert make_check("x", "id", 5.0, None, "g", "reported").as_expected
    with pytest.raises(ValueError):
        make_check("x", "id", 0.0, 1.0, "g", "bogus")


def test_all_suite_prefixes_names():
    rep = run_suite("all", SuiteParams())
    prefixes = {c.name.split(".")[0] for c in rep.checks}
    assert prefixes == {"curve", "surface", "highdim"}
    assert rep.passed


@pytest.mark.parametrize(
    "suite,sp",
    [
        ("curve", SuiteParams(gamma0=0.0)),
        ("surface", SuiteParams(a=0.0, b=0.0)),
        ("surface", SuiteParams(a=1.0)),
        ("highdim", SuiteParams(p=0)),
        ("nonsense", SuiteParams()),
    ],
)
def test_invalid_suite_params(suite, sp):
    with pytest.raises(ValueError):
        run_suite(suite, sp)


# -- curve CSV -----------------------------------------------------------------


def test_curve_csv_three_samples(tmp_path):
    path = tmp_path / "c.csv"
    text = export.emit_curve(ScrewParams(1.0, 1.0), (-1, 1), 3, path)
    raw = path.read_bytes()
    assert raw.decode() == text
    assert b"\r" not in raw
    lines = text.splitlines()
    assert lines[0] == "s,eta,r,theta,kappa,x,y"
    assert len(lines) == 4
    mid = [float(v) for v in lines[2].split(",")]
    assert mid[0] == 0.0
    assert mid[2] == pytest.approx(1.0, abs=1e-15)


def test_curve_csv_round_trips_doubles():
    p = ScrewParams(0.7, 1.3)
    text = export.curve_csv(p, (-2, 3), 7)
    for line, s in zip(text.splitlines()[1:], np.linspace(-2, 3, 7)):
        vals = [float(v) for v in line.split(",")]
        smp = c2.sample(float(s), p)
        assert vals[2] == smp.r
        assert vals[5:] == list(smp.position)


@pytest.mark.parametrize("rng_", [(1.0, -1.0), (math.nan, 1.0), (0.0, math.inf)])
def test_curve_invalid_range(rng_):
    with pytest.raises(ValueError):
        export.curve_csv(ScrewParams(1.0, 1.0), rng_, 3)


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        export.emit_curve(ScrewParams(1.0, 1.0), (-1, 1), 3, tmp_path / "missing" / "c.csv")


# -- meshes --------------------------------------------------------------------


@pytest.fixture
def bonnet():
    return export.chart_for("bonnet", a=1.0, b=-1.0)


def test_obj_counts(bonnet):
    mesh, text = export.emit_mesh(bonnet, (-1, 1), (0, math.pi), 3, "obj")
    lines = text.splitlines()
    v = [ln for ln in lines if ln.startswith("v ")]
    f = [ln for ln in lines if ln.startswith("f ")]
    assert len(v) == 9 and len(f) == 8
    idx = np.array([[int(i) for i in ln.split()[1:]] for ln in f])
    assert idx.min() == 1 and idx.max() == 9
    # v lines come first, row-major
    assert lines.index(f[0]) == 9
    np.testing.assert_array_equal(np.array([[float(c) for c in ln.split()[1:]] for ln in v]), mesh.vertices)


def test_ply_header(bonnet):
    mesh, text = export.emit_mesh(bonnet, (-1, 1), (0, math.pi), 3, "ply")
    head, body = text.split("end_header\n")
    assert head.startswith("ply\nformat ascii 1.0\n")
    assert "element vertex 9" in head and "element face 8" in head
    assert "property double mean_curvature_abs" in head
    rows = body.splitlines()
    assert len(rows) == 17
    assert all(r.startswith("3 ") for r in rows[9:])
    assert max(float(r.split()[3]) for r in rows[:9]) <= 1e-10


def test_csv_mesh(bonnet):
    mesh, text = export.emit_mesh(bonnet, (-1, 1), (0, math.pi), (3, 4), "csv")
    lines = text.splitlines()
    assert lines[0] == "x,y,z,mean_curvature_abs"
    assert len(lines) == 13


@pytest.mark.parametrize("fmt_name", ["obj", "ply", "csv"])
def test_mesh_deterministic(tmp_path, bonnet, fmt_name):
    a, b = tmp_path / "a", tmp_path / "b"
    export.emit_mesh(bonnet, (-1, 1), (0, math.pi), 5, fmt_name, a)
    export.emit_mesh(bonnet, (-1, 1), (0, math.pi), 5, fmt_name, b)
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_mesh_errors(bonnet):
    with pytest.raises(ValueError):
        export.emit_mesh(bonnet, (-1, 1), (0, 1), 3, "stl")
    with pytest.raises(ValueError):
        export.emit_mesh(bonnet, (1, -1), (0, 1), 3, "obj")
    with pytest.raises(ValueError):
        export.chart_for("bonnet", a=0.0, b=0.0)
    with pytest.raises(ValueError):
        export.chart_for("torus")


# -- CLI -----------------------------------------------------------------------


def test_cli_curve(capsys):
    assert cli.main(["curve", "--gamma0", "1", "--omega", "1", "--s-range=-1:1", "--samples", "3"]) == 0
    out = capsys.readouterr().out
    assert out == export.curve_csv(ScrewParams(1.0, 1.0), (-1, 1), 3)


def test_cli_curve_file_twice(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert cli.main(["curve", "--s-range=-2:2", "--samples", "11", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_mesh(tmp_path):
    out = tmp_path / "m.obj"
    argv = ["mesh", "--chart", "bonnet", "--a", "1", "--b", "-1", "--u-range=-1:1",
            "--v-range", "0:3.141592653589793", "--samples", "3", "--out", str(out)]
    assert cli.main(argv) == 0
    text = out.read_text()
    assert text.count("\nv ") + text.startswith("v ") == 9
    assert text.count("\nf ") == 8


def test_cli_verify_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["verify", "--suite", "curve", "--json", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    rep = ResidualReport.from_json(out.read_text())
    assert rep.passed and rep.suite == "curve"
    assert json.loads(printed) == json.loads(out.read_text())


def test_cli_verify_failure_exit(monkeypatch):
    bad = ResidualReport("curve", {}, [Check("x", "id", 1.0, 1e-3, False, "g")])
    monkeypatch.setattr(cli, "run_suite", lambda *a, **k: bad)
    assert cli.main(["verify", "--suite", "curve"]) == 1


def test_cli_roots(capsys):
    assert cli.main(["roots", "--gamma0", "1", "--samples", "2", "--json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["roots"][0]["eta"] == pytest.approx(2.3650, abs=1e-4)


def test_cli_highdim(capsys):
    assert cli.main(["highdim", "--samples", "50", "--json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["draws"] == 50 and d["fraction_above_1e-3"] >= 0.9


@pytest.mark.parametrize(
    "argv",
    [
        ["curve", "--s-range", "nope"],
        ["curve", "--s-range=1:-1"],
        ["curve", "--samples", "0"],
        ["mesh", "--samples", "1"],
        ["mesh", "--a", "0", "--b", "0"],
        ["verify", "--a", "1"],
        ["verify", "--gamma0", "0", "--suite", "curve"],
        ["highdim", "--p", "0"],
        ["frobnicate"],
        ["curve", "--bogus"],
        [],
    ],
)
def test_cli_usage_errors(argv, capsys):
    assert cli.main(argv) == 2


def test_cli_unwritable(tmp_path):
    with pytest.raises(OSError):
        cli.main(["curve", "--samples", "3", "--out", str(tmp_path / "no" / "x.csv")])


def test_cli_reports_reproducible():
    # the verify numbers come from the same module calls a user would make
    rep = run_suite("highdim", SuiteParams())
    chk = next(c for c in rep.checks if c.name == "mixed_e_grad_r")
    r = hd.mixed_example_check(1.0, 2.0, [math.pi / 3, math.pi / 4, 0.5], hd.DEFAULT_H)
    assert chk.max_residual == pytest.approx(abs(r.e_grad_r), abs=1e-15)
