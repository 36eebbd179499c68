"""Tests for the scenario runner and CSV export."""

import json

import numpy as np
import pytest

from ifsmeasure import VectorMeasure
from ifsmeasure.cli import export_cumulative, main, run


def test_bundled_triangular_scenario(tmp_path):
    code, report = run("cantor_triangular", out_dir=str(tmp_path))
    assert code == 0
    assert "0.3125, 0.375" in report
    assert "0.482842712474619" in report
    assert (tmp_path / "cantor_triangular_cumulative.csv").exists()


def test_bundled_kernel_scenario():
    code, report = run("separable_kernel")
    assert code == 0
    assert "1824/3329" in report and "120/3329" in report
    assert "exact_residual_zero=true" in report


def test_bundled_decay_scenario():
    code, report = run("decay_transfer")
    assert code == 0
    assert "residual=" in report


def test_bundled_blend_scenario(tmp_path):
    code, report = run("cantor_blend", out_dir=str(tmp_path))
    assert code == 0
    assert "residual_mk_star=" in report


def test_report_is_deterministic(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    a = run("cantor_triangular", out_dir=str(tmp_path / "a"), fmt="json")
    b = run("cantor_triangular", out_dir=str(tmp_path / "b"), fmt="json")
    ja = json.loads(a[1])
    jb = json.loads(b[1])
    # the reports differ only in the export path
    for ra, rb in zip(ja["results"], jb["results"]):
        ra.pop("path", None)
        rb.pop("path", None)
    assert ja == jb
    c = run("separable_kernel", fmt="text")
    d = run("separable_kernel", fmt="text")
    assert c == d


def test_missing_scenario_is_a_parse_error(tmp_path):
    code, report = run(str(tmp_path / "nope.json"))
    assert code == 2 and "error" in report


def test_malformed_json_is_a_parse_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _ = run(str(p))
    assert code == 2


def test_unknown_command_is_a_validation_error(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({
        "kind": "kernel",
        "kernels": [{"scale": 1, "terms": [[[0, 1], [0, 1]]]},
                    {"scale": 1, "terms": [[[0, 1], [0, 1]]]}],
        "commands": ["frobnicate"],
    }))
    code, _ = run(str(p))
    assert code == 2


def test_empty_command_list_succeeds(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({
        "kind": "kernel",
        "kernels": [{"scale": 1, "terms": [[[0, 1], [0, 1]]]},
                    {"scale": 1, "terms": [[[0, 1], [0, 1]]]}],
        "commands": [],
    }))
    code, report = run(str(p))
    assert code == 0
    assert report.strip() == "scenario: s"


def test_precondition_failure_exits_3(tmp_path):
    doc = {
        "kind": "ifs", "dimension": 1,
        "maps": [[0.3333333333333333, 0.0], [0.3333333333333333, 0.6666666666666666]],
        "operators": [[[0.5]], [[0.5]]],
        "solver": {"norm": "variation"},
        "commands": ["solve"],
    }
    p = tmp_path / "s.json"
    p.write_text(json.dumps(doc))
    code, report = run(str(p))
    assert code == 3 and "precondition" in report


def test_iteration_budget_failure_exits_4(tmp_path):
    # the bundled scenario with an absurd iteration cap
    from importlib import resources
    raw = resources.files("ifsmeasure").joinpath(
        "scenarios/cantor_triangular.json").read_text()
    doc = json.loads(raw)
    doc["solver"]["max_iter"] = 1
    doc["commands"] = ["solve"]
    p = tmp_path / "s.json"
    p.write_text(json.dumps(doc))
    code, report = run(str(p))
    assert code == 4 and "tolerance" in report


def test_tol_override_reaches_solver(tmp_path):
    from importlib import resources
    raw = resources.files("ifsmeasure").joinpath(
        "scenarios/cantor_triangular.json").read_text()
    doc = json.loads(raw)
    doc["commands"] = ["solve"]
    p = tmp_path / "s.json"
    p.write_text(json.dumps(doc))
    code_a, rep_a = run(str(p), tol=1e-4)
    code_b, rep_b = run(str(p), tol=1e-8)
    assert code_a == code_b == 0
    iters_a = int(rep_a.split("iterations=")[1].split()[0])
    iters_b = int(rep_b.split("iterations=")[1].split()[0])
    assert iters_a < iters_b


def test_main_entry_point(tmp_path, capsys):
    assert main(["run", "separable_kernel"]) == 0
    out = capsys.readouterr().out
    assert "scenario: separable_kernel" in out
    assert main(["run", str(tmp_path / "missing.json")]) == 2
    err = capsys.readouterr().err
    assert "error" in err


def test_json_format_parses(tmp_path):
    code, report = run("decay_transfer", fmt="json")
    assert code == 0
    doc = json.loads(report)
    assert doc["scenario"] == "decay_transfer"
    assert any("residual" in r for r in doc["results"])


def test_export_cumulative_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    mu = VectorMeasure(
        atoms=[(float(t), rng.standard_normal(2)) for t in (0.25, 0.5)],
        pieces=[((0.1, 0.7), rng.standard_normal(2))])
    path = tmp_path / "curve.csv"
    rows = export_cumulative(mu, 101, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,F1,F2"
    assert len(lines) == rows + 1
    for line in lines[1:]:
        t, *vals = [float(v) for v in line.split(",")]
        want = mu.cumulative(t)
        assert np.abs(np.array(vals) - want).max() < 1e-12


def test_export_cumulative_shows_jumps(tmp_path):
    mu = VectorMeasure.dirac(0.5, np.array([1.0]))
    path = tmp_path / "jump.csv"
    export_cumulative(mu, 5, path)
    rows = [line.split(",") for line in path.read_text().strip().splitlines()[1:]]
    ts = np.array([float(r[0]) for r in rows])
    vs = np.array([float(r[1]) for r in rows])
    i = int(np.searchsorted(ts, 0.5))
    assert ts[i] == 0.5 and vs[i] == 1.0
    assert ts[i - 1] < 0.5 and vs[i - 1] == 0.0


def test_export_cumulative_requires_two_samples(tmp_path):
    with pytest.raises(ValueError):
        export_cumulative(VectorMeasure.zero(1), 1, tmp_path / "x.csv")
