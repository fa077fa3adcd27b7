import json
import math
import os

import pytest

from ringmod import harness
from ringmod.cli import main


def strip_times(payload):
    if isinstance(payload, dict):
        return {k: strip_times(v) for k, v in payload.items() if k != "wall_time"}
    if isinstance(payload, list):
        return [strip_times(v) for v in payload]
    return payload


def test_scenario_registry_complete():
    # one scenario per named suite; every check carries a provenance tag
    assert {"a2", "lambda2", "measure-selftest", "twist-certification",
            "solver-annulus", "solver-image-invariance"} <= set(harness.SCENARIOS)
    rep = harness.run_scenario("a2")
    assert rep.passed
    assert all(c.provenance in ("literature", "trivial", "derived") for c in rep.checks)


def test_unknown_scenario():
    with pytest.raises(KeyError):
        harness.run_scenario("nope")


def test_scenario_errors_become_failures(monkeypatch):
    def boom(cfg):
        raise RuntimeError("exploded")
    monkeypatch.setitem(
        harness.SCENARIOS, "boom",
        harness.Scenario(id="boom", tags=("fast",), description="", runner=boom))
    rep = harness.run_scenario("boom")
    assert not rep.passed
    assert "exploded" in str(rep.checks[0].actual)


def test_report_determinism():
    r1 = harness.run_scenario("measure-selftest")
    r2 = harness.run_scenario("measure-selftest")
    j1 = json.dumps(strip_times(r1.to_json()), sort_keys=True)
    j2 = json.dumps(strip_times(r2.to_json()), sort_keys=True)
    assert j1 == j2


def test_config_validation():
    with pytest.raises(ValueError):
        harness.HarnessConfig(tol_scale=0.5)
    with pytest.raises(ValueError):
        harness.HarnessConfig(jobs=0)
    c = harness.HarnessConfig(tol_scale=2.0)
    assert len(c.digest()) == 16


def test_run_all_filter():
    agg = harness.run_all(tag="special")
    ids = [s["scenario"] for s in agg["scenarios"]]
    assert ids == sorted(ids)
    assert set(ids) == {"a2", "lambda2", "special-constants"}
    assert agg["passed"]


def test_emit_csv(tmp_path):
    path = tmp_path / "out.csv"
    harness.emit_csv(str(path), ["a", "b"], [[1, 2.5], [3, 4.5]])
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "a,b"
    assert len(lines) == 3
    # empty sweep: header only
    harness.emit_csv(str(path), ["x", "y"], [])
    assert path.read_text() == "x,y\n"


def test_emit_svg(tmp_path):
    path = tmp_path / "plot.svg"
    harness.emit_svg(str(path), [0, 1, 2], [0.0, 1.0, 0.5], "t", "g", "demo")
    text = path.read_text()
    assert text.startswith("<svg")
    assert "polyline" in text
    harness.emit_svg(str(path), [], [], "t", "g")
    assert "polyline" not in path.read_text()


def test_sweeps():
    cols, rows = harness.sweep("teichmuller-gap")
    assert cols == ["t", "gap"]
    assert len(rows) == 200
    # decreasing toward the tail, capped by the boundary value
    assert rows[0][1] > rows[-1][1]
    assert rows[0][1] <= math.pi + 1e-9
    cols, rows = harness.sweep("continuity2")
    assert cols == ["d", "bound"]
    with pytest.raises(KeyError):
        harness.sweep("unknown")


def test_cli_special_a2(capsys):
    assert main(["special", "a2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == pytest.approx(math.pi, abs=1e-6)
    assert out["attained_at_boundary"] is True


def test_cli_special_constants_and_psi2(capsys):
    assert main(["special", "constants", "--n", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["lambda_upper"] == pytest.approx(12.676131, abs=1e-5)
    assert main(["special", "psi2", "--t", "1.0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == pytest.approx(math.exp(math.pi), rel=1e-9)


def test_cli_modulus_with_density(tmp_path, capsys):
    dens = tmp_path / "rho.csv"
    code = main(["modulus", "--shape", "annulus:n=2,r0=1,r1=2.718281828459045",
                 "--grid", "16x64", "--emit-density", str(dens)])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["m_gamma"] == pytest.approx(2 * math.pi, rel=0.02)
    lines = dens.read_text().strip().split("\n")
    assert lines[0] == "x1_tail,x2_tail,x1_head,x2_head,rho,length"
    # every data cell must be a plain parseable float
    first = [float(v) for v in lines[1].split(",")]
    assert len(first) == 6 and first[-1] > 0


def test_cli_modulus_image(capsys):
    code = main(["modulus", "--shape", "semiring:n=2,r=1,R=2.718281828459045",
                 "--map", "radial:a=0.8", "--grid", "16x33"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["mo"] == pytest.approx(0.8, rel=0.03)


def test_cli_dilatation(capsys):
    code = main(["dilatation", "--map", "twist", "--x", "0.5,0.2", "--x0", "0,0"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["angular"] == pytest.approx(1.0, abs=1e-8)
    assert out["jac_det"] == pytest.approx(1.0, abs=1e-12)
    assert out["matrix"]["inner"] == pytest.approx((1 + math.sqrt(2)) ** 2, abs=1e-9)


def test_cli_bounds_separation_and_domfac(capsys):
    assert main(["bounds", "separation", "--mo", "10", "--n", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["left"] == pytest.approx(0.129651, abs=1e-5)
    assert main(["bounds", "domfac", "--gamma", "1", "--M", str(math.pi),
                 "--r0", "1", "--n", "2", "--m", "10"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["left"] == pytest.approx(out["right"], rel=1e-8)
    assert out["details"]["divergence"] == "divergent"


def test_cli_bounds_eq1est(capsys):
    code = main(["bounds", "eq1est", "--map", "radial:a=0.8",
                 "--shape", "semiring:n=2,r=1,R=2.718281828459045"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["left"] == pytest.approx(0.8, abs=1e-3)
    assert out["right"] == pytest.approx(0.8, abs=1e-3)
    assert out["verdict"] == "inconclusive"   # no image modulus supplied


def test_cli_sweep_csv_svg(tmp_path, capsys):
    csv = tmp_path / "gap.csv"
    svg = tmp_path / "gap.svg"
    assert main(["--csv", str(csv), "sweep", "teichmuller-gap", "--svg", str(svg)]) == 0
    capsys.readouterr()
    assert csv.read_text().split("\n")[0] == "t,gap"
    assert "<svg" in svg.read_text()


def test_cli_verify_filter_and_outputs(tmp_path, capsys):
    jpath = tmp_path / "report.json"
    cpath = tmp_path / "report.csv"
    code = main(["--json", str(jpath), "--csv", str(cpath),
                 "verify", "--filter", "special"])
    assert code == 0
    payload = json.loads(jpath.read_text())
    assert payload["passed"] is True
    assert [s["scenario"] for s in payload["scenarios"]] == ["a2", "lambda2", "special-constants"]
    header = cpath.read_text().split("\n")[0]
    assert header == "scenario,check,expected,actual,tolerance,provenance,verdict"
    capsys.readouterr()


def test_cli_verify_determinism(tmp_path, capsys):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--json", str(p1), "verify", "--filter", "special"]) == 0
    assert main(["--json", str(p2), "verify", "--filter", "special"]) == 0
    capsys.readouterr()
    a = strip_times(json.loads(p1.read_text()))
    b = strip_times(json.loads(p2.read_text()))
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_cli_config_file_and_env(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "ringmod.cfg"
    cfg.write_text("# comment\ntol-scale = 1.0\n")
    assert main(["--config", str(cfg), "special", "a2"]) == 0
    capsys.readouterr()
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense-key = 1\n")
    assert main(["--config", str(bad), "special", "a2"]) == 2
    capsys.readouterr()
    monkeypatch.setenv("RINGMOD_JOBS", "2")
    assert main(["special", "a2"]) == 0
    capsys.readouterr()


def test_cli_verify_failure_exit_code(capsys, monkeypatch):
    def failing(cfg):
        return [harness.CheckResult("always-fails", 0.0, 1.0, 1e-9, "trivial", False)]
    monkeypatch.setitem(
        harness.SCENARIOS, "zz-fail",
        harness.Scenario(id="zz-fail", tags=("failtag",), description="", runner=failing))
    assert main(["verify", "--filter", "failtag"]) == 1
    capsys.readouterr()


def test_run_all_parallel_jobs():
    cfg = harness.HarnessConfig(jobs=2)
    agg = harness.run_all(tag="special", config=cfg)
    assert agg["passed"]
    assert [s["scenario"] for s in agg["scenarios"]] == ["a2", "lambda2", "special-constants"]


def test_cli_bounds_eq1est_with_image(capsys):
    code = main(["bounds", "eq1est", "--map", "radial:a=0.8",
                 "--shape", "semiring:n=2,r=1,R=2.718281828459045",
                 "--with-image", "--image-grid", "16x33"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "holds"
    assert out["details"]["ratio"] == pytest.approx(0.8, rel=0.03)


def test_cli_error_exit_codes(capsys):
    assert main(["modulus", "--shape", "blob:n=2", "--grid", "16x16"]) == 2
    capsys.readouterr()
    assert main(["--tol-scale", "0.5", "special", "a2"]) == 2
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc:
        main(["not-a-command"])
    assert exc.value.code == 2
