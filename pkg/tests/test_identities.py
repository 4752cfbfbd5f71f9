"""Registry-level tests: every identity check runs and passes one trial.

The acceptance suite exercises the heavy draw counts; here each check runs
once so a failure pinpoints the broken identity quickly.
"""

import json

import pytest

from ellipgamma.identities import (
    CHECKS,
    IdentityReport,
    list_checks,
    run_all,
    run_check,
)

ALL_NAMES = sorted(CHECKS)


def test_registry_metadata():
    rows = list_checks()
    assert len(rows) == len(CHECKS) >= 30
    for name, tol, trials, tags, doc in rows:
        assert name == name.lower() and " " not in name
        assert 0.0 < tol <= 1e-5
        assert trials >= 1
        assert tags and all(isinstance(t, str) for t in tags)
        assert doc and doc[0].isalnum()


@pytest.mark.parametrize("name", ALL_NAMES)
def test_check_passes_single_trial(name):
    reports = run_check(name, seed=0, trials=1)
    assert len(reports) == 1
    rep = reports[0]
    assert rep.name == name
    assert rep.passed, (f"{name}: residual {rep.residual:.3e} "
                        f"exceeds {rep.tol:.1e}")
    assert rep.parts, "every check reports at least one labelled part"
    for part in rep.parts:
        assert part.passed


def test_reports_are_json_lines_with_stable_keys():
    rep = run_check("theta-addition", seed=3, trials=1)[0]
    line = rep.to_json()
    doc = json.loads(line)
    assert doc["name"] == "theta-addition"
    assert doc["seed"] == 3 and doc["trial"] == 0
    assert doc["passed"] is True
    assert isinstance(doc["residual"], float)
    # serialized complex numbers are [re, im] pairs
    assert isinstance(doc["params"]["p"], list) and len(doc["params"]["p"]) == 2
    # timing never enters the serialized record, keys are sorted
    assert "elapsed" not in doc
    assert line == rep.to_json()
    keys = list(doc)
    assert keys == sorted(keys)


def test_rerun_is_bitwise_identical():
    first = [r.to_json() for r in run_check("recurrence-kernel", seed=9, trials=3)]
    second = [r.to_json() for r in run_check("recurrence-kernel", seed=9, trials=3)]
    assert first == second


def test_tolerance_override_forces_failure():
    rep = run_check("theta-addition", seed=0, trials=1, tol=1e-30)[0]
    assert not rep.passed
    assert rep.tol == 1e-30


def test_unknown_name_rejected():
    with pytest.raises(KeyError):
        run_check("not-a-check", seed=0, trials=1)


def test_run_all_subset_order():
    names = ["exterior-power", "cauchy-determinant"]
    reports = run_all(seed=0, trials=1, names=names)
    assert [r.name for r in reports] == names
    assert all(isinstance(r, IdentityReport) for r in reports)
