import json
import re
import subprocess
import sys
from pathlib import Path

import pytest

from parastruct.cli import main

MALFORMED = sorted((Path(__file__).parent / "data" / "malformed").glob("*.toml"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_catalog_list_and_show(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0
    assert [line.split()[0] for line in out.splitlines()] == ["flat2d", "relative_weitzenbock", "sphere_lc"]
    code, out, _ = run(capsys, "catalog", "show", "sphere_lc")
    assert code == 0 and '"G^1_22"' in out
    code, _, err = run(capsys, "catalog", "show", "torus")
    assert code == 2 and "no fixture" in err


@pytest.mark.parametrize("name", ["flat2d", "sphere_lc", "relative_weitzenbock"])
def test_verify_fixtures_pass(capsys, name):
    code, out, _ = run(capsys, "verify", name, "--samples", "2", "--format", "json")
    report = json.loads(out)
    assert code == 0
    assert report["verdict"] == "pass"
    assert set(report) == {"tool", "kernel_version", "config", "seed", "samples", "suites", "verdict"}
    assert len(report["suites"]) == 13
    for suite in report["suites"]:
        assert list(suite) == ["name", "status", "max_residual", "tolerance", "samples", "worst_point", "message"]


def test_expected_asymmetric_statuses(capsys):
    code, out, _ = run(capsys, "verify", "relative_weitzenbock", "--suite", "symmetry,cyclic,bianchi", "--samples", "2")
    assert code == 0
    assert re.search(r"symmetry\s+expected-fail", out)
    assert re.search(r"cyclic\s+informational", out)
    assert re.search(r"bianchi\s+informational", out)
    assert out.rstrip().endswith("verdict: pass")


def test_tolerance_override_reports_violation(capsys):
    code, out, _ = run(capsys, "verify", "sphere_lc", "--suite", "bianchi", "--samples", "2", "--tol", "bianchi=1e-300")
    assert code == 1
    assert "verdict: fail" in out


def test_symmetric_config_declared_asymmetric_fails(capsys, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('name = "c"\nexpected_asymmetric = true\n[chart]\ncoords = ["x", "y"]\ndomain = [[0, 1], [0, 1]]\n')
    code, out, _ = run(capsys, "verify", str(cfg), "--suite", "symmetry", "--samples", "2")
    assert code == 1
    assert "but it vanished" in out


def test_evaluation_error_exits_2(capsys, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('name = "c"\n[chart]\ncoords = ["x", "y"]\ndomain = [[-1, 1], [0, 1]]\n[connection]\n"G^1_11" = "log(x)"\n')
    code, out, err = run(capsys, "verify", str(cfg), "--suite", "axioms", "--samples", "20", "--format", "json")
    assert code == 2
    assert json.loads(out)["suites"][0]["status"] == "error"
    assert "evaluation error" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "sphere_lc", "--suite", "nope"],
        ["verify", "sphere_lc", "--samples", "0"],
        ["verify", "sphere_lc", "--tol", "cyclic"],
        ["verify", "sphere_lc", "--format", "xml"],
        ["frobnicate"],
    ],
)
def test_bad_arguments_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


@pytest.mark.parametrize(
    "config,quantity,point,args,expected",
    [
        ("sphere_lc", "nabla_v", "1.0471975511965976,0", ["e_ph", "e_ph"], "(-0.433012701892, 0)"),
        ("sphere_lc", "gamma_plus", "1.0471975511965976,0", ["e2", "dth"], "(0, -0.433012701892)"),
        ("sphere_lc", "rho", "1.0471975511965976,0", ["e1", "e2", "e2"], "(0.75, 0)"),
        ("sphere_lc", "omega", "1.0471975511965976,0", ["e_ph", "dth"], "0.75 dth^dph"),
        ("flat2d", "theta", "1,0", ["dx2"], "0"),
        ("flat2d", "curl", "1,0", ["form[0; x1]"], "1 dx1^dx2"),
        ("relative_weitzenbock", "theta", "2,0", ["beta2"], "-0.25 dx1^dx2"),
        ("relative_weitzenbock", "torsion", "2,0", ["b1", "b2"], "(0, -1)"),
    ],
)
def test_evaluate(capsys, config, quantity, point, args, expected):
    code, out, _ = run(capsys, "evaluate", config, "--quantity", quantity, "--point", point, "--args", *args)
    assert code == 0
    assert out.strip() == expected


@pytest.mark.parametrize(
    "args",
    [
        ["--quantity", "rho", "--point", "1,0", "--args", "e1"],
        ["--quantity", "rho", "--point", "1,0", "--args", "e1", "e2", "dth"],
        ["--quantity", "theta", "--point", "1", "--args", "dth"],
        ["--quantity", "theta", "--point", "9,0", "--args", "dth"],
        ["--quantity", "theta", "--point", "1,0", "--args", "form[0; q]"],
    ],
)
def test_evaluate_errors_exit_2(capsys, args):
    code, _, err = run(capsys, "evaluate", "sphere_lc", *args)
    assert code == 2
    assert err.startswith("parastruct: ")


@pytest.mark.parametrize("path", MALFORMED, ids=[p.stem for p in MALFORMED])
def test_malformed_corpus(capsys, path):
    code, out, err = run(capsys, "verify", str(path))
    assert code == 2
    assert out == ""
    assert re.match(rf"parastruct: {re.escape(str(path))}:\d+:\d+: \S", err)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "parastruct", "catalog", "list"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "sphere_lc" in proc.stdout


def test_text_and_json_reports_carry_the_same_residuals(capsys):
    argv = ["verify", "sphere_lc", "--samples", "3", "--seed", "11"]
    _, out_json, _ = run(capsys, *argv, "--format", "json")
    _, out_text, _ = run(capsys, *argv, "--format", "text")
    for suite in json.loads(out_json)["suites"]:
        line = next(ln for ln in out_text.splitlines() if ln.split() and ln.split()[0] == suite["name"])
        assert f"{suite['max_residual']:.6e}" in line
