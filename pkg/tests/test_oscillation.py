import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from painleve_tz.integrator import IntegratorConfig, dense_eval, integrate, sample
from painleve_tz.oscillation import (ERROR_BAND_FACTOR, SQUEEZE_LIMIT, above_gap_bound,
                                     below_gap_bound, bounds_audit, comparison_identity, crossings,
                                     deviation_residual, envelope_stats, exact_squeeze_margins,
                                     first_integral_residual, gap_audit)
from painleve_tz.series import EquationForm, taylor_coefficients

PM = EquationForm.PIMINUS


@pytest.fixture(scope="module")
def events(minus100):
    return crossings(minus100, 100.0)


def test_gap_bound_constants():
    assert below_gap_bound(1.0) == pytest.approx(1.2825498301618641, rel=1e-15)
    with mpmath.workdps(30):
        ref = mpmath.pi / mpmath.sqrt(6 * (1 + mpmath.sqrt(3)))
    assert above_gap_bound(1.0) == pytest.approx(float(ref), rel=1e-15)
    assert round(above_gap_bound(1.0), 5) == 0.77594
    assert below_gap_bound(16.0) == pytest.approx(below_gap_bound(1.0) / 2, rel=1e-15)


def test_first_crossing(events):
    t0 = events[0].t
    assert 1.0 < t0 < 1.25 ** 0.4
    assert events[0].direction == "upward"
    assert events[0].index == 0


def test_crossings_alternate_and_count(events):
    assert len(events) > 40
    for a, b in zip(events, events[1:]):
        assert a.direction != b.direction
        assert b.t > a.t
    assert [e.index for e in events] == list(range(len(events)))


def test_crossings_are_roots(minus100, events):
    for ev in events[:50]:
        st = dense_eval(minus100, ev.t)
        assert abs(st.s - math.sqrt(ev.t)) < 1e-12 * 50


def test_crossings_stable_under_tolerance_halving(minus100_half, events):
    other = crossings(minus100_half, 100.0)
    assert len(other) == len(events)
    diff = max(abs(a.t - b.t) for a, b in zip(events, other))
    assert diff < 1e-8


def test_no_crossing_before_one(minus100):
    short = integrate(PM, IntegratorConfig(t_max=1.0))
    assert crossings(short) == []
    assert crossings(minus100, 1.0) == []


def test_crossings_reject_wrong_form(plus):
    with pytest.raises(ValueError):
        crossings(plus)


def test_crossings_reject_window_beyond_coverage(minus100):
    with pytest.raises(ValueError):
        crossings(minus100, 200.0)


def test_gap_audit_all_pass(events):
    records = gap_audit(events)
    assert len(records) == len(events) - 1 >= 20
    assert all(r.passed for r in records)
    sides = {r.side for r in records}
    assert sides == {"above", "below"}
    for r in records:
        if r.side == "above":
            assert r.bound_kind == "lower_above" and r.gap > r.bound_value
            assert r.bound_value == above_gap_bound(r.b)
        else:
            assert r.bound_kind == "upper_below" and r.gap < r.bound_value
            assert r.bound_value == below_gap_bound(r.a)


def test_gap_audit_detects_violation():
    from painleve_tz.oscillation import CrossingEvent
    fake = [CrossingEvent(1.0, "downward", 0, 0.0), CrossingEvent(5.0, "upward", 1, 0.0),
            CrossingEvent(5.01, "downward", 2, 0.0)]
    recs = gap_audit(fake)
    assert not recs[0].passed  # below-interval far longer than allowed
    assert not recs[1].passed  # above-interval far shorter than allowed


def test_first_integral_residual(minus100, minus100_fine):
    ts = np.geomspace(1e-3, 100, 100)
    res = np.abs(first_integral_residual(minus100, ts))
    rows = sample(minus100, ts)
    assert np.all(res <= 1e-7 * np.maximum(1, np.abs(12 * ts * rows[:, 1])))
    fine = np.abs(first_integral_residual(minus100_fine, ts))
    assert res.max() / fine.max() >= 5
    assert isinstance(first_integral_residual(minus100, 2.0), float)


def test_first_integral_rejects_wrong_form(plus):
    with pytest.raises(ValueError):
        first_integral_residual(plus, 1.0)


def test_error_band_covers_actual_error():
    # the band used by the audit must dominate the true error of s on the squeeze window
    ser = taylor_coefficients(PM, 200)
    ts = np.linspace(0.02, 0.9, 45)
    with mpmath.workdps(30):
        exact = np.array([float(mpmath.fsum(mpmath.mpf(a.numerator) / a.denominator * mpmath.mpf(t) ** n
                                            for n, a in ser.nonzero())) for t in ts])
    for tol in (1e-9, 1e-10, 1e-11):
        traj = integrate(PM, IntegratorConfig(rel_tol=tol, abs_tol=tol, t_max=1.0))
        s = sample(traj, ts)[:, 1]
        band = ERROR_BAND_FACTOR * (tol + tol * np.abs(s))
        assert np.all(np.abs(s - exact) < band)


def test_bounds_audit_clean(minus100):
    ts = np.geomspace(1e-3, 100, 200)
    rep = bounds_audit(minus100, ts)
    assert rep.ok
    assert rep["sqrt3t"].passed == 200
    assert rep["positivity"].passed + rep["positivity"].unresolved == 200
    assert rep["cubic_upper"].checked == int(np.sum(ts < SQUEEZE_LIMIT))


def test_bounds_audit_with_companion(minus100, minus100_fine):
    ts = np.geomspace(1e-2, 50, 50)
    assert bounds_audit(minus100, ts, companion=minus100_fine).ok


def test_bounds_audit_rejects_nonpositive_probe(minus100):
    with pytest.raises(ValueError):
        bounds_audit(minus100, [0.0, 1.0])


def test_bounds_audit_catches_corruption():
    bad = integrate(PM, IntegratorConfig(t_max=1.8), rhs=lambda t, s: -6 * s * s - 6 * t)
    rep = bounds_audit(bad, np.geomspace(0.05, 1.8, 50))
    assert not rep["positivity"].ok
    assert not rep["sqrt3t"].ok
    assert not rep.ok


@pytest.mark.parametrize("t", list(np.geomspace(1e-3, 0.9, 25)))
def test_exact_squeeze_margins_positive(t):
    margins = exact_squeeze_margins(t)
    for name, (margin, tail) in margins.items():
        assert margin > tail > 0, name


def test_exact_squeeze_margins_range():
    with pytest.raises(ValueError):
        exact_squeeze_margins(0.0)
    with pytest.raises(ValueError):
        exact_squeeze_margins(1.6)
    margin, tail = exact_squeeze_margins(Fraction(1, 2))["cubic_upper"]
    assert isinstance(margin, Fraction)


def test_deviation_residual(minus100):
    rng = np.random.default_rng(3)
    for t in rng.uniform(0.1, 50, 100):
        st = dense_eval(minus100, t)
        assert abs(deviation_residual(minus100, t)) <= 1e-12 * max(1, 6 * t, 6 * st.s ** 2)
    with pytest.raises(ValueError):
        deviation_residual(minus100, 0.0)


@pytest.mark.parametrize("a, b, lam", [(0.5, 1.3, None), (2.0, 2.7, 15.0), (1.1, 4.0, 3.0),
                                       (30.0, 30.4, 40.0), (7.0, 9.5, None)])
def test_comparison_identity(minus100, a, b, lam):
    left, right = comparison_identity(minus100, a, b, lam)
    assert left == pytest.approx(right, rel=1e-7, abs=1e-9)


def test_comparison_identity_nontrivial(minus100):
    left, right = comparison_identity(minus100, 2.0, 2.7, 15.0)
    assert abs(left) > 1e-3


def test_envelope_stats(minus500, events):
    env = envelope_stats(minus500, (1e-9, 200.0))
    assert 1 < env.max_ratio < math.sqrt(2)
    # the largest excursion is the first one above the square root
    assert events[0].t < env.argmax_ratio < events[1].t
    a = envelope_stats(minus500, (10.0, 100.0))
    b = envelope_stats(minus500, (100.0, 500.0))
    assert b.max_scaled_dev <= a.max_scaled_dev
    with pytest.raises(ValueError):
        envelope_stats(minus500, (10.0, 600.0))
