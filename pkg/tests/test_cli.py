"""End-to-end tests for the command-line interface and its exit codes.

Exit-code contract: 0 success, 1 invalid input, 2 verification failure or
non-convergence, 3 sampler infeasibility.  Most tests drive main() in
process; one subprocess test covers the installed module entry point.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from ellipgamma.cli import main
from ellipgamma.specfun import BasePair, theta

V_DOC = {
    "p": [0.13, 0.04], "q": [0.05, 0.27],
    "t": [[0.48, 0.1], [-0.42, 0.2], [0.1, 0.5], [0.51, -0.08],
          [-0.05, -0.47], [0.3, -0.35], [0.25, 0.4], [0.0, 0.0]],
    "normalize_last": True,
}


def _run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def _write_params(tmp_path, doc, name="params.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def test_eval_theta_inline(capsys):
    code, out, _ = _run(["eval", "theta",
                         "--inline", '{"p": [0.1, 0.05], "t": [[0.4, 0.2]]}'],
                        capsys)
    assert code == 0
    doc = json.loads(out)
    expected = theta(0.4 + 0.2j, 0.1 + 0.05j)
    assert complex(*doc["value"]) == pytest.approx(expected)
    assert doc["converged"] is True and doc["nodes_used"] == 0


def test_eval_v_from_file(tmp_path, capsys):
    path = _write_params(tmp_path, V_DOC)
    code, out, _ = _run(["eval", "v", "--params", path], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["converged"] is True
    assert doc["nodes_used"] <= 1024
    assert doc["err_est"] < 1e-8


def test_eval_det_and_direct_routes_agree(tmp_path, capsys):
    rest = [[0.45, 0.12], [-0.38, 0.25], [0.12, 0.52], [0.5, -0.1],
            [-0.08, -0.5], [0.33, -0.3], [0.28, 0.38], [0.42, 0.0],
            [-0.2, 0.42], [0.0, 0.0]]
    doc = {"p": [0.11, 0.03], "q": [0.04, 0.24], "n": 2, "m": 1, "t": rest}
    path = _write_params(tmp_path, doc)
    code_det, out_det, _ = _run(["eval", "inm_det", "--params", path], capsys)
    code_dir, out_dir, _ = _run(
        ["eval", "inm_direct", "--params", path, "--rtol", "1e-8"], capsys)
    assert code_det == 0 and code_dir == 0
    v_det = complex(*json.loads(out_det)["value"])
    v_dir = complex(*json.loads(out_dir)["value"])
    assert abs(v_det - v_dir) / abs(v_dir) <= 1e-6


def test_eval_invalid_inputs_exit_1(tmp_path, capsys):
    # missing parameter source
    assert _run(["eval", "v"], capsys)[0] == 1
    # unreadable file
    assert _run(["eval", "v", "--params", str(tmp_path / "nope.json")],
                capsys)[0] == 1
    # malformed JSON
    assert _run(["eval", "v", "--inline", "{oops"], capsys)[0] == 1
    # violated balance with normalization off
    bad = dict(V_DOC)
    bad["normalize_last"] = False
    bad["t"] = V_DOC["t"][:7] + [[0.5, 0.0]]
    code, _, err = _run(["eval", "v", "--params",
                         _write_params(tmp_path, bad)], capsys)
    assert code == 1
    assert "balanc" in err.lower()
    # wrong slot count
    short = dict(V_DOC)
    short["t"] = V_DOC["t"][:5]
    assert _run(["eval", "v", "--params",
                 _write_params(tmp_path, short, "short.json")], capsys)[0] == 1


def test_eval_nonconvergence_exits_2(tmp_path, capsys):
    path = _write_params(tmp_path, V_DOC)
    code, out, _ = _run(["eval", "v", "--params", path,
                         "--nodes", "16", "--rtol", "1e-14"], capsys)
    assert code == 2
    assert json.loads(out)["converged"] is False


def test_eval_out_respects_outdir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ELLIPGAMMA_OUTDIR", str(tmp_path / "results"))
    path = _write_params(tmp_path, V_DOC)
    code, out, _ = _run(["eval", "v", "--params", path, "--out", "v.json"],
                        capsys)
    assert code == 0
    saved = json.loads((tmp_path / "results" / "v.json").read_text())
    assert saved == json.loads(out)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_emits_ndjson_and_passes(capsys):
    code, out, err = _run(["verify", "theta-addition", "--trials", "3"],
                          capsys)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 3
    for trial, line in enumerate(lines):
        doc = json.loads(line)
        assert doc["name"] == "theta-addition"
        assert doc["trial"] == trial
        assert doc["passed"] is True
    assert "theta-addition: 3/3 pass" in err


def test_verify_rerun_is_byte_identical(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ELLIPGAMMA_OUTDIR", str(tmp_path))
    args = ["verify", "recurrence-kernel", "--trials", "2", "--seed", "5"]
    assert _run(args + ["--out", "a.ndjson"], capsys)[0] == 0
    assert _run(args + ["--out", "b.ndjson"], capsys)[0] == 0
    assert (tmp_path / "a.ndjson").read_bytes() == (
        tmp_path / "b.ndjson").read_bytes()


def test_verify_failure_and_usage_exit_codes(capsys):
    code, out, _ = _run(["verify", "theta-addition", "--trials", "2",
                         "--tol", "1e-30"], capsys)
    assert code == 2
    assert all(json.loads(l)["passed"] is False for l in out.splitlines())
    assert _run(["verify", "no-such-check"], capsys)[0] == 1
    assert _run(["verify"], capsys)[0] == 1
    assert _run(["verify", "all", "--nm", "1,1"], capsys)[0] == 1
    assert _run(["verify", "theta-addition", "--nm", "oops"], capsys)[0] == 1


def test_verify_family_selection(capsys):
    code, out, _ = _run(["verify", "transformation", "--nm", "1,1",
                         "--trials", "1"], capsys)
    assert code == 0
    assert json.loads(out.splitlines()[0])["name"] == "transformation-1-1"
    code, out, _ = _run(["verify", "recurrence-down", "--nm", "1,0",
                         "--trials", "1"], capsys)
    assert code == 0
    assert json.loads(out.splitlines()[0])["name"] == "recurrence-down-n1-m0"


def test_verify_list(capsys):
    code, out, _ = _run(["verify", "--list"], capsys)
    assert code == 0
    assert "theta-addition" in out
    assert "beta-integral" in out


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def test_bench_reports_eval_advantage(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ELLIPGAMMA_OUTDIR", str(tmp_path))
    code, out, _ = _run(["bench", "--nm", "2,1", "--rtol", "1e-8",
                         "--out", "bench.json"], capsys)
    assert code == 0
    assert "eval ratio (tensor/det):" in out
    summary = json.loads((tmp_path / "bench.json").read_text())
    assert summary["ratio"] >= 5.0
    assert summary["agreement"] <= 1e-6
    assert summary["converged"] is True


def test_bench_rejects_other_dimensions(capsys):
    assert _run(["bench", "--nm", "1,0"], capsys)[0] == 1
    assert _run(["bench", "--nm", "2,2"], capsys)[0] == 1


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def test_report_aggregates_and_flags_failures(tmp_path, capsys):
    _run(["verify", "theta-addition", "--trials", "2",
          "--out", str(tmp_path / "good.ndjson")], capsys)
    code, out, _ = _run(["report", str(tmp_path)], capsys)
    assert code == 0
    assert "theta-addition" in out and "100.0%" in out

    _run(["verify", "recurrence-kernel", "--trials", "1", "--tol", "1e-30",
          "--out", str(tmp_path / "bad.ndjson")], capsys)
    code, out, _ = _run(["report", str(tmp_path)], capsys)
    assert code == 2
    assert "recurrence-kernel" in out

    code, out, _ = _run(["report", str(tmp_path / "good.ndjson")], capsys)
    assert code == 0


def test_report_empty_and_missing(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    code, out, _ = _run(["report", str(empty)], capsys)
    assert code == 0
    assert "identity" in out          # header only
    assert _run(["report", str(tmp_path / "missing")], capsys)[0] == 1
    garbled = tmp_path / "x.ndjson"
    garbled.write_text("not json\n")
    assert _run(["report", str(tmp_path)], capsys)[0] == 1


# ---------------------------------------------------------------------------
# top level
# ---------------------------------------------------------------------------

def test_usage_errors_exit_1(capsys):
    assert _run([], capsys)[0] == 1
    assert _run(["eval", "nosuch"], capsys)[0] == 1
    assert _run(["eval", "v", "--nodes", "many"], capsys)[0] == 1


def test_module_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "ellipgamma.cli", "eval", "gamma", "--inline",
         '{"p": [0.1, 0.0], "q": [0.0, 0.2], "t": [[0.5, 0.1]]}'],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    from ellipgamma.specfun import elliptic_gamma
    expected = elliptic_gamma(0.5 + 0.1j, BasePair(0.1, 0.2j))
    assert complex(*doc["value"]) == pytest.approx(expected)
