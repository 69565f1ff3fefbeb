import json
import re
import math

import pytest

from painleve_tz import checks
from painleve_tz.checks import (FAIL, PASS, REGISTRY, SKIPPED, Outcome, VerifyConfig,
                                cross_form_mismatch, run_checks)
from painleve_tz.io import dumps


@pytest.fixture(scope="module")
def default_report():
    return run_checks(VerifyConfig())


@pytest.fixture(scope="module")
def short_report():
    return run_checks(VerifyConfig(t_max=1.0))


@pytest.fixture(scope="module")
def corrupt_report():
    return run_checks(VerifyConfig(corrupt_rhs=True, t_max=100.0))


def test_registry_shape():
    assert len(REGISTRY) >= 30
    for cid, entry in REGISTRY.items():
        assert entry.check_id == cid
        assert entry.anchor and entry.claim
        # anchors name the claim, not a numbered location
        assert not re.search(r"\d", entry.anchor)


def test_default_config_all_pass(default_report):
    failing = [(c.check_id, c.details) for c in default_report.checks if c.status != PASS]
    assert failing == []
    assert default_report.ok


def test_every_check_reported_once_in_order(default_report):
    ids = [c.check_id for c in default_report.checks]
    assert ids == sorted(REGISTRY)


def test_report_json_roundtrip(default_report):
    text = dumps(default_report.to_dict())
    data = json.loads(text)
    assert data["schema"] == checks.SCHEMA
    assert data["summary"][PASS] == len(REGISTRY)
    assert data["config"]["t_max"] == 500.0
    assert "NaN" not in text and "Infinity" not in text


def test_short_horizon_skips_gap_checks(short_report):
    status = {c.check_id: c.status for c in short_report.checks}
    for cid in ("minus.below_gaps", "minus.above_gaps", "minus.crossing_alternation",
                "minus.first_crossing", "minus.ratio_envelope", "minus.decay_envelope"):
        assert status[cid] == SKIPPED, cid
    assert FAIL not in status.values()


def test_corrupted_rhs_fails_positivity_and_sqrt_bound(corrupt_report):
    status = {c.check_id: c.status for c in corrupt_report.checks}
    assert status["minus.positivity"] == FAIL
    assert status["minus.sqrt3t_bound"] == FAIL
    assert not corrupt_report.ok
    # the closed-form checks do not depend on the right-hand side
    assert status["series.triple_zero"] == PASS
    assert status["blowup.analytic_lower_bound"] == PASS


def test_exception_becomes_failure(monkeypatch):
    def boom(ctx):
        raise RuntimeError("broken check")
    entry = REGISTRY["series.sparsity"]
    monkeypatch.setitem(REGISTRY, "series.sparsity", checks.Check(entry.check_id, entry.anchor,
                                                                  entry.claim, boom))
    report = run_checks(VerifyConfig(), only=["series.sparsity", "series.triple_zero"])
    rec = report.by_id("series.sparsity")
    assert rec.status == FAIL and "broken check" in rec.details
    assert report.by_id("series.triple_zero").status == PASS
    assert not report.ok


def test_only_subset():
    report = run_checks(VerifyConfig(), only=["blowup.window"])
    assert [c.check_id for c in report.checks] == ["blowup.window"]
    with pytest.raises(KeyError):
        report.by_id("series.sparsity")


def test_duplicate_registration_rejected():
    with pytest.raises(ValueError):
        checks.check("series.sparsity", "x", "y")(lambda ctx: Outcome(PASS))


def test_report_deterministic():
    ids = ["series.recurrence_residual", "blowup.window", "minus.first_crossing"]
    a = dumps(run_checks(VerifyConfig(t_max=5.0), only=ids).to_dict())
    b = dumps(run_checks(VerifyConfig(t_max=5.0), only=ids).to_dict())
    assert a == b


def test_cross_form_mismatch_small():
    worst, n = cross_form_mismatch(VerifyConfig())
    assert n == 20 and worst <= 1e-8
    assert math.isfinite(worst)
