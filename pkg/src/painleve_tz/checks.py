"""Registry of verification checks and the report they produce.

Each check is a plain function of a :class:`VerifyContext` returning an
:class:`Outcome`. Trajectories are computed lazily and shared between checks.
"""
from __future__ import annotations

import math
import traceback
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable

import numpy as np

from . import __version__
from .blowup import (analytic_lower_bound, bounding_integral, bracket_from_state,
                     estimate_blowup, minimal_upper_bound)
from .integrator import IntegratorConfig, Trajectory, dense_eval, integrate, sample
from .oscillation import (SQUEEZE_LIMIT, above_gap_bound, below_gap_bound, bounds_audit,
                          comparison_identity, crossings, deviation_residual, envelope_stats,
                          exact_squeeze_margins, first_integral_residual, gap_audit)
from .series import (EquationForm, TRUST_RADIUS, convert_form, eval_series,
                     residual_low_degree, scaling, taylor_coefficients)

SCHEMA = "painleve-tz/verification-report/1"
PASS, FAIL, SKIPPED = "pass", "fail", "skipped"

FIRST_CROSSING_UPPER = 1.25 ** 0.4
BLOWUP_WINDOW = (1.82, 1.83)
RATIO_CAP = math.sqrt(2.0)


@dataclass(frozen=True)
class VerifyConfig:
    """Settings of one verification run.

    ``corrupt_rhs`` is a negative control: every trajectory the context
    integrates uses ``c2 s^2 - c1 t`` instead of ``c2 s^2 + c1 t``. The
    blow-up estimator runs its own integration and is unaffected.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    t_max: float = 500.0
    corrupt_rhs: bool = False

    def integrator(self, t_max: float, **changes) -> IntegratorConfig:
        return IntegratorConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol, t_max=t_max, **changes)


@dataclass(frozen=True)
class Outcome:
    status: str
    worst_margin: float = math.nan
    details: str = ""


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    anchor: str
    status: str
    worst_margin: float
    details: str


@dataclass
class VerificationReport:
    version: str
    config: dict
    checks: list[CheckRecord] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def counts(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, SKIPPED: 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    def by_id(self, check_id: str) -> CheckRecord:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "version": self.version,
            "config": self.config,
            "summary": self.counts(),
            "checks": [asdict(c) for c in self.checks],
        }


@dataclass(frozen=True)
class Check:
    check_id: str
    anchor: str
    claim: str
    run: Callable[["VerifyContext"], Outcome]


REGISTRY: dict[str, Check] = {}


def check(check_id: str, anchor: str, claim: str):
    def register(fn):
        if check_id in REGISTRY:
            raise ValueError(f"duplicate check id {check_id}")
        REGISTRY[check_id] = Check(check_id, anchor, claim, fn)
        return fn
    return register


def _corrupted_rhs(form: EquationForm):
    # negative control: flip the sign of the forcing term
    return lambda t, s: form.c2 * s * s - form.c1 * t


class VerifyContext:
    """Lazily computed trajectories shared by the checks."""

    OSC_HORIZON = 100.0

    def __init__(self, config: VerifyConfig):
        self.config = config

    def _integrate(self, form: EquationForm, cfg: IntegratorConfig) -> Trajectory:
        rhs = _corrupted_rhs(form) if self.config.corrupt_rhs else None
        return integrate(form, cfg, rhs=rhs)

    @cached_property
    def minus(self) -> Trajectory:
        return self._integrate(EquationForm.PIMINUS, self.config.integrator(self.config.t_max))

    @cached_property
    def minus_fine(self) -> Trajectory:
        horizon = min(self.config.t_max, self.OSC_HORIZON)
        return self._integrate(EquationForm.PIMINUS,
                               self.config.integrator(horizon).scaled(0.1))

    @cached_property
    def plus(self) -> Trajectory:
        return self._integrate(EquationForm.PIPLUS, self.config.integrator(10.0))

    @cached_property
    def blowup(self):
        return estimate_blowup(self.config.integrator(10.0), width_tol=1e-6)

    @cached_property
    def horizon(self) -> float:
        """End of the audited oscillation range, clipped to coverage."""
        return min(self.config.t_max, self.OSC_HORIZON, self.minus.coverage[1])

    @cached_property
    def events(self):
        return crossings(self.minus, self.horizon)

    def probes(self, hi: float, n: int = 100, lo: float = 1e-3) -> np.ndarray:
        if hi <= lo:
            return np.array([hi])
        return np.geomspace(lo, hi, n)


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def _coverage_note(traj: Trajectory, wanted: float) -> str:
    hi = traj.coverage[1]
    return "" if hi >= wanted else f"; coverage ends at t={hi:.6g} ({traj.termination})"


# ---------------------------------------------------------------- series

@check("series.triple_zero", "triple-zero data",
       "a0 = a1 = a2 = 0 and a3 = c1/6 for every form (w'''(0) = 1 for PI)")
def _triple_zero(ctx):
    bad = []
    for form in EquationForm:
        a = taylor_coefficients(form, 3).coeffs
        if a[:3] != (0, 0, 0) or a[3] != Fraction(form.c1, 6):
            bad.append(form.value)
    return Outcome(_status(not bad), details=f"forms failing: {bad}" if bad else "a3 = 1/6, 1, 1")


@check("series.sparsity", "fifth-root symmetry",
       "a_n = 0 unless n = 3 (mod 5), through order 28, every form")
def _sparsity(ctx):
    bad = [(f.value, n) for f in EquationForm
           for n, a in enumerate(taylor_coefficients(f, 28).coeffs)
           if (a != 0) != (n % 5 == 3)]
    return Outcome(_status(not bad), details=f"offending entries: {bad[:5]}" if bad else "sparse")


@check("series.cubic_squeeze_coefficients", "cubic squeeze",
       "pi-minus series starts t^3 - (3/28) t^8")
def _cubic_coeffs(ctx):
    a = taylor_coefficients(EquationForm.PIMINUS, 12).coeffs
    ok = a[3] == 1 and a[8] == Fraction(-3, 28) and all(a[n] == 0 for n in range(13) if n not in (3, 8))
    return Outcome(_status(ok), details=f"a3={a[3]}, a8={a[8]}")


@check("series.refined_squeeze_coefficients", "refined squeeze",
       "a13 = 3/364 and a18 differs from -3/13328")
def _refined_coeffs(ctx):
    a = taylor_coefficients(EquationForm.PIMINUS, 18).coeffs
    ok = a[13] == Fraction(3, 364) and a[18] != Fraction(-3, 13328)
    return Outcome(_status(ok), details=f"a13={a[13]}, a18={a[18]} (squeeze uses -3/13328)")


@check("series.recurrence_residual", "triple-zero data",
       "order-N series leaves an ODE residual of degree >= N-1 (exact arithmetic)")
def _recurrence(ctx):
    worst = math.inf
    bad = []
    for form in EquationForm:
        for order in (3, 8, 18, 28):
            low = residual_low_degree(taylor_coefficients(form, order))
            margin = math.inf if low is None else low - (order - 1)
            worst = min(worst, margin)
            if margin < 0:
                bad.append((form.value, order, low))
    return Outcome(_status(not bad), worst, f"failures: {bad}" if bad else "all residual degrees >= N-1")


@check("series.seed_consistency", "triple-zero data",
       "series (order 28) and dense output agree within 20 local tolerances on (0, 0.5]")
def _seed(ctx):
    worst = 0.0
    cfg = ctx.config
    ts = np.linspace(0.01, 0.5, 50)
    for form, traj in ((EquationForm.PIMINUS, ctx.minus), (EquationForm.PIPLUS, ctx.plus)):
        ser = taylor_coefficients(form, 28)
        if traj.coverage[1] < ts[-1]:
            return Outcome(FAIL, details=f"{form.value} trajectory ends early")
        rows = sample(traj, ts)
        for t, row in zip(ts, rows):
            s, sd = eval_series(ser, t, TRUST_RADIUS)
            for exact, approx in ((s, row[1]), (sd, row[2])):
                allowance = 20 * (cfg.abs_tol + cfg.rel_tol * abs(exact))
                worst = max(worst, abs(exact - approx) / allowance)
    return Outcome(_status(worst <= 1), 1 - worst, f"max deviation / allowance {worst:.3g}")


# ---------------------------------------------------------------- forms

@check("forms.round_trip", "real rescalings",
       "convert_form followed by its inverse is the identity to 4 ulps-scale")
def _round_trip(ctx):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(200):
        t, s, sd = rng.normal(size=3) * 3
        for src in EquationForm:
            for dst in EquationForm:
                back = convert_form(*convert_form(t, s, sd, src, dst), dst, src)
                for x, y in zip((t, s, sd), back):
                    worst = max(worst, abs(x - y) / max(abs(x), 1e-300))
    return Outcome(_status(worst <= 4 * 8 * np.finfo(float).eps), details=f"max relative error {worst:.3g}")


def cross_form_mismatch(cfg: VerifyConfig, n: int = 20) -> tuple[float, int]:
    """Largest relative disagreement of the three forms, after rescaling, at
    *n* points split between positive and negative PI arguments."""
    integ = lambda form, t_max: integrate(form, cfg.integrator(t_max))
    zs = np.concatenate([np.linspace(0.5, 2.4, n // 2), -np.linspace(0.5, 8.0, n - n // 2)])
    forms = (EquationForm.PI, EquationForm.PIPLUS, EquationForm.PIMINUS)
    trajs = {}
    for form in forms:
        alpha, _ = scaling(EquationForm.PI, form)
        t_lo, t_hi = sorted((zs.min() / alpha, zs.max() / alpha))
        trajs[form] = (integ(form, t_lo * 1.01), integ(form, t_hi * 1.01))
    worst = 0.0
    for z in zs:
        states = []
        for form in forms:
            alpha, _ = scaling(EquationForm.PI, form)
            tf = z / alpha
            traj = trajs[form][0] if tf < 0 else trajs[form][1]
            st = dense_eval(traj, tf)
            states.append(np.array(convert_form(st.t, st.s, st.sdot, form, EquationForm.PI)[1:]))
        for other in states[1:]:
            scale = max(np.linalg.norm(states[0]), np.linalg.norm(other))
            worst = max(worst, float(np.linalg.norm(states[0] - other) / scale))
    return worst, len(zs)


@check("forms.cross_consistency", "real rescalings",
       "PI, PI+ and PI- trajectories agree under rescaling to relative 1e-8 at 20 points")
def _cross(ctx):
    worst, n = cross_form_mismatch(ctx.config)
    return Outcome(_status(worst <= 1e-8), 1e-8 - worst, f"max relative mismatch {worst:.3g} over {n} points")


# ---------------------------------------------------------------- blow-up

def _plus_steps(ctx):
    traj = ctx.plus
    mask = traj.t > 0
    return traj.t[mask], traj.y[mask, 0], traj.y[mask, 1]


@check("plus.growth", "blow-up: growth from the forcing",
       "s > t^3 and s' > 3 t^2 for t > 0 (resolved steps)")
def _plus_growth(ctx):
    t, s, sd = _plus_steps(ctx)
    cfg = ctx.plus.config
    worst, bad, unresolved = math.inf, 0, 0
    for value, bound in ((s, t ** 3), (sd, 3 * t ** 2)):
        band = 20 * (cfg.abs_tol + cfg.rel_tol * np.abs(value)) + 8e-16 * np.abs(value)
        rel = (value - bound) / np.maximum(np.abs(bound), 1e-300)
        res = np.abs(value - bound) > band
        bad += int(np.sum(res & (value < bound)))
        unresolved += int(np.sum(~res))
        if np.any(res):
            worst = min(worst, float(np.min(rel[res])))
    return Outcome(_status(bad == 0 and ctx.plus.t_end > 1), worst,
                   f"{bad} violations, {unresolved} unresolved of {2 * t.size} step values")


def _energy_band(ctx, s, sd):
    cfg = ctx.plus.config
    scale = sd * sd + 4 * np.abs(s) ** 3
    return 20 * (cfg.rel_tol * scale + cfg.abs_tol * (2 * np.abs(sd) + 12 * s * s)) + 64 * np.finfo(float).eps * scale


@check("plus.energy_increasing", "blow-up bracket",
       "s'^2 - 4 s^3 strictly increases across accepted steps")
def _energy(ctx):
    t, s, sd = _plus_steps(ctx)
    energy = sd * sd - 4 * s ** 3
    noise = _energy_band(ctx, s, sd)
    diff = np.diff(energy)
    res = np.abs(diff) > noise[1:] + noise[:-1]
    bad = int(np.sum(res & (diff < 0)))
    worst = float(np.min(diff[res])) if np.any(res) else math.nan
    return Outcome(_status(bad == 0 and np.sum(res) > 10), worst,
                   f"{bad} decreases among {int(np.sum(res))} resolved increments "
                   f"({int(np.sum(~res))} within the error band)")


@check("plus.derivative_bound", "blow-up bracket",
       "s' > 2 s^(3/2) at every accepted step with t > 0")
def _derivative_bound(ctx):
    t, s, sd = _plus_steps(ctx)
    cfg = ctx.plus.config
    negative = int(np.sum(s <= 0))
    target = np.maximum(2 * np.maximum(s, 0.0) ** 1.5, np.finfo(float).tiny)
    rel = (sd - target) / target
    # relative noise in s' and s^(3/2) from the local tolerance
    band = 100 * (cfg.rel_tol + cfg.abs_tol / np.maximum(np.abs(s), 1e-300)) + 1e-15
    res = np.abs(rel) > band
    bad = int(np.sum(res & (rel < 0))) + negative
    worst = float(np.min(rel[res])) if np.any(res) else math.nan
    return Outcome(_status(bad == 0 and np.sum(res) > 10), worst,
                   f"{bad} violations among {int(np.sum(res))} resolved steps")


@check("blowup.bracket_nesting", "blow-up bracket",
       "successive brackets tau + s(tau)^(-1/2) are nested and shrinking")
def _nesting(ctx):
    hist = ctx.blowup.history
    # the upper edge settles on the blow-up time; allow rounding in tau + s^-1/2
    slack = 8 * np.finfo(float).eps * BLOWUP_WINDOW[1]
    ok = all(b[0] >= a[0] and b[1] <= a[1] + slack and b[1] - b[0] < a[1] - a[0]
             for a, b in zip(hist, hist[1:]))
    return Outcome(_status(ok and len(hist) > 1), details=f"{len(hist)} brackets, final width {ctx.blowup.width:.3g}")


@check("blowup.window", "closer analysis window",
       "the blow-up time lies between 1.82 and 1.83")
def _window(ctx):
    est = ctx.blowup
    margin = min(est.lower - BLOWUP_WINDOW[0], BLOWUP_WINDOW[1] - est.upper)
    return Outcome(_status(margin > 0 and est.converged), margin,
                   f"bracket [{est.lower!r}, {est.upper!r}]")


@check("blowup.analytic_lower_bound", "blow-up lower bound",
       "closed-form lower bound is 1.449...")
def _analytic(ctx):
    v = analytic_lower_bound()
    return Outcome(_status(1.449 < v < 1.450), min(v - 1.449, 1.450 - v), f"value {v!r}")


@check("blowup.bounds_ordering", "blow-up lower bound",
       "analytic bound < bounding integral < bracket < 1.960..., each gap > 1e-3")
def _ordering(ctx):
    est = ctx.blowup
    chain = [analytic_lower_bound(), bounding_integral(), est.lower, est.upper, minimal_upper_bound()]
    # the bracket's own width is set by the ladder, not by a claimed separation
    gaps = [chain[1] - chain[0], chain[2] - chain[1], chain[4] - chain[3]]
    ok = min(gaps) > 1e-3 and est.upper > est.lower
    return Outcome(_status(ok), min(gaps), "chain " + " < ".join(f"{x:.10g}" for x in chain))


@check("blowup.inexpensive_upper", "blow-up bracket",
       "at tau = (3/2)^(2/5): tau + s(tau)^(-1/2) <= tau + tau^(-3/2) = 1.960...")
def _inexpensive(ctx):
    tau = 1.5 ** 0.4
    if not ctx.plus.covers(tau):
        return Outcome(FAIL, details="trajectory does not reach (3/2)^(2/5)")
    st = dense_eval(ctx.plus, tau)
    if not st.s > 0:
        return Outcome(FAIL, details=f"s((3/2)^(2/5)) = {st.s!r} is not positive")
    _, upper = bracket_from_state(tau, st.s)
    cap = minimal_upper_bound()
    return Outcome(_status(upper < cap and abs(cap - 1.960) < 1e-3), cap - upper,
                   f"numerical upper {upper:.10g}, closed form {cap:.10g}")


@check("blowup.pole_shape", "second-order pole",
       "s (t_mid - t)^2 stays within [0.1, 10] over the last decade of s")
def _pole(ctx):
    est = ctx.blowup
    traj = est.trajectory
    s = traj.y[:, 0]
    sel = (s >= est.s_at_tau / 10) & (traj.t <= est.tau_used)
    vals = s[sel] * (est.midpoint - traj.t[sel]) ** 2
    if vals.size < 3:
        return Outcome(FAIL, details="too few steps in the last decade")
    lo, hi = float(vals.min()), float(vals.max())
    return Outcome(_status(0.1 < lo and hi < 10), min(lo - 0.1, 10 - hi),
                   f"range [{lo:.4g}, {hi:.4g}] over {vals.size} steps")


# ---------------------------------------------------------------- oscillation

@check("minus.coverage", "maximal domain",
       "the pi-minus solution exists on the whole requested range")
def _coverage(ctx):
    traj = ctx.minus
    ok = traj.coverage[1] >= ctx.config.t_max
    return Outcome(_status(ok), details=f"reached t={traj.coverage[1]:.6g} ({traj.termination})")


@check("minus.first_integral", "first integral",
       "|s'^2 + 4 s^3 + 12 q - 12 t s| <= 1e-7 max(1, |12 t s|) at 100 probes")
def _first_integral(ctx):
    ts = ctx.probes(ctx.horizon)
    rows = sample(ctx.minus, ts)
    res = first_integral_residual(ctx.minus, ts)
    scale = 1e-7 * np.maximum(1.0, np.abs(12 * ts * rows[:, 1]))
    ratio = np.abs(res) / scale
    return Outcome(_status(bool(np.all(ratio <= 1))), float(1 - ratio.max()),
                   f"max residual / allowance {ratio.max():.3g}")


@check("minus.first_integral_convergence", "first integral",
       "first-integral residual shrinks at least 5x when tolerances tighten 10x")
def _fi_conv(ctx):
    hi = min(ctx.horizon, ctx.minus_fine.coverage[1])
    ts = ctx.probes(hi)
    coarse = np.abs(first_integral_residual(ctx.minus, ts)).max()
    fine = np.abs(first_integral_residual(ctx.minus_fine, ts)).max()
    factor = coarse / fine if fine > 0 else math.inf
    return Outcome(_status(factor >= 5), factor - 5, f"max residual {coarse:.3g} -> {fine:.3g}")


def _audit(ctx, hi):
    ts = ctx.probes(hi)
    return ts, bounds_audit(ctx.minus, ts)


@check("minus.positivity", "positivity",
       "s(t) > 0 for t > 0")
def _positivity(ctx):
    hi = min(ctx.config.t_max, ctx.minus.coverage[1])
    ts, rep = _audit(ctx, hi)
    s_raw = sample(ctx.minus, ts)[:, 1]
    steps = ctx.minus.y[1:, 0]
    worst = float(min(s_raw.min(), steps.min()))
    ok = worst > 0 and rep["positivity"].ok
    return Outcome(_status(ok), worst, f"min s over probes and steps {worst:.3g}"
                   + _coverage_note(ctx.minus, ctx.config.t_max))


@check("minus.sqrt3t_bound", "square-root bound",
       "s(t)^2 < 3 t for t > 0")
def _sqrt3t(ctx):
    hi = min(ctx.config.t_max, ctx.minus.coverage[1])
    ts, rep = _audit(ctx, hi)
    t = ctx.minus.t[1:]
    s = ctx.minus.y[1:, 0]
    step_margin = float(np.min(np.sqrt(3 * t) - np.abs(s)))
    chk = rep["sqrt3t"]
    worst = min(step_margin, chk.worst_margin)
    return Outcome(_status(chk.ok and step_margin > 0), worst,
                   f"{chk.passed}/{chk.checked} probes resolved and passing"
                   + _coverage_note(ctx.minus, ctx.config.t_max))


def _squeeze(ctx, name: str, hi: float) -> Outcome:
    hi = min(hi, ctx.minus.coverage[1])
    ts = ctx.probes(hi)
    rep = bounds_audit(ctx.minus, ts)
    chk = rep[name]
    exact_failures = []
    for t in chk.unresolved_at:
        margin, tail = exact_squeeze_margins(t)[name]
        if not margin > tail:
            exact_failures.append(t)
    ok = chk.ok and not exact_failures and chk.checked > 0
    return Outcome(_status(ok), chk.worst_margin,
                   f"{chk.passed} probes resolved by the trajectory, {chk.unresolved} settled by the "
                   f"exact series, {len(chk.violations)} violations, {len(exact_failures)} series failures")


@check("minus.cubic_squeeze", "cubic squeeze",
       "t^3 - (3/28) t^8 < s(t) < t^3 on (0, 0.9]")
def _cubic(ctx):
    a = _squeeze(ctx, "cubic_upper", 0.9)
    b = _squeeze(ctx, "squeeze_lower", 0.9)
    return Outcome(_status(a.status == PASS and b.status == PASS),
                   min(a.worst_margin, b.worst_margin), f"upper: {a.details}; lower: {b.details}")


@check("minus.refined_squeeze", "refined squeeze",
       "s(t) < t^3 - (3/28) t^8 + (3/364) t^13 - (3/13328) t^18 below (28/3)^(1/5)")
def _refined(ctx):
    return _squeeze(ctx, "refined_upper", min(0.9, SQUEEZE_LIMIT))


@check("minus.first_crossing", "first crossing",
       "the first crossing t0 of s and sqrt(t) satisfies 1 < t0 < (5/4)^(2/5)")
def _first_crossing(ctx):
    early = [e for e in ctx.events if e.t <= 1.0]
    if early:
        return Outcome(FAIL, details=f"crossing at {early[0].t!r} before t = 1")
    if ctx.horizon < FIRST_CROSSING_UPPER:
        return Outcome(SKIPPED, details=f"horizon {ctx.horizon:.6g} ends before (5/4)^(2/5); no crossing in (0, 1]")
    if not ctx.events:
        return Outcome(FAIL, details="no crossing found")
    t0 = ctx.events[0].t
    margin = min(t0 - 1.0, FIRST_CROSSING_UPPER - t0)
    return Outcome(_status(margin > 0 and ctx.events[0].direction == "upward"), margin, f"t0 = {t0!r}")


@check("minus.crossing_alternation", "oscillation about the square root",
       "crossing directions alternate starting upward; sign of s - sqrt(t) is constant between")
def _alternation(ctx):
    ev = ctx.events
    if len(ev) < 2:
        return Outcome(SKIPPED, details=f"{len(ev)} crossings up to t={ctx.horizon:.6g}")
    ok = ev[0].direction == "upward" and all(a.direction != b.direction for a, b in zip(ev, ev[1:]))
    worst = math.inf
    for a, b in zip(ev, ev[1:]):
        ts = np.linspace(a.t, b.t, 34)[1:-1]
        dev = sample(ctx.minus, ts)[:, 1] - np.sqrt(ts)
        signed = dev if a.direction == "upward" else -dev
        worst = min(worst, float(signed.min()))
    return Outcome(_status(ok and worst > 0), worst, f"{len(ev)} crossings up to t={ctx.horizon:.6g}")


@check("minus.inflection", "concavity about the parabola",
       "sign of s'' equals sign of t - s^2 (s'' differentiated from the dense output)")
def _inflection(ctx):
    ts = np.linspace(0.05, ctx.horizon - 1e-3, 4000) if ctx.horizon > 0.1 else np.array([])
    if ts.size == 0:
        return Outcome(SKIPPED, details="range too short")
    h = 1e-5
    up = sample(ctx.minus, ts + h)[:, 2]
    dn = sample(ctx.minus, ts - h)[:, 2]
    sdd = (up - dn) / (2 * h)
    s = sample(ctx.minus, ts)[:, 1]
    gap = ts - s * s
    resolved = np.abs(gap) > 1e-4
    bad = int(np.sum(resolved & (np.sign(sdd) != np.sign(gap))))
    return Outcome(_status(bad == 0), details=f"{bad} sign mismatches among {int(resolved.sum())} probes")


@check("minus.deviation_equation", "deviation equation",
       "f'' = phi - Phi f for f = s - sqrt(t), relative 1e-12")
def _deviation(ctx):
    rng = np.random.default_rng(11)
    hi = min(50.0, ctx.minus.coverage[1])
    worst = 0.0
    for t in rng.uniform(0.1, hi, 200):
        st = dense_eval(ctx.minus, t)
        scale = max(1.0, 6 * t, 6 * st.s * st.s)
        worst = max(worst, abs(deviation_residual(ctx.minus, t)) / scale)
    return Outcome(_status(worst <= 1e-12), 1e-12 - worst, f"max relative residual {worst:.3g}")


@check("minus.comparison_identity", "comparison identity",
       "integral of (phi + (lam - Phi) f) g equals [f' g - f g'] on sample intervals")
def _comparison(ctx):
    hi = ctx.horizon
    if hi < 3:
        return Outcome(SKIPPED, details="range too short")
    worst = 0.0
    for a, b, lam in ((0.5, 1.3, None), (2.0, 2.7, 15.0), (hi / 2, hi / 2 + 0.4, 40.0), (1.1, 4.0, 3.0)):
        left, right = comparison_identity(ctx.minus, a, b, lam)
        worst = max(worst, abs(left - right) / max(1.0, abs(left), abs(right)))
    return Outcome(_status(worst <= 1e-7), 1e-7 - worst, f"max relative mismatch {worst:.3g}")


def _gap_records(ctx):
    return gap_audit(ctx.events)


@check("minus.below_gaps", "below-interval gaps",
       "b - a < pi 6^(-1/2) a^(-1/4) on every interval with s below sqrt(t)")
def _below(ctx):
    recs = [r for r in _gap_records(ctx) if r.side == "below"]
    if not recs:
        return Outcome(SKIPPED, details="no complete below-interval")
    worst = min(r.margin for r in recs)
    return Outcome(_status(worst > 0), worst, f"{len(recs)} intervals")


@check("minus.above_gaps", "above-interval gaps",
       "b - a > pi (6 (1 + sqrt 3))^(-1/2) b^(-1/4) on every interval with s above sqrt(t)")
def _above(ctx):
    recs = [r for r in _gap_records(ctx) if r.side == "above"]
    if not recs:
        return Outcome(SKIPPED, details="no complete above-interval")
    worst = min(r.margin for r in recs)
    return Outcome(_status(worst > 0), worst, f"{len(recs)} intervals")


def _short_range(ctx, needed: float) -> Outcome | None:
    """Skip when the requested horizon is too short; fail when the
    integration stopped before reaching it."""
    if ctx.config.t_max < needed:
        return Outcome(SKIPPED, details=f"needs t_max >= {needed:g}, have {ctx.config.t_max:g}")
    if ctx.minus.coverage[1] < needed:
        return Outcome(FAIL, details=f"integration stopped at t={ctx.minus.coverage[1]:.6g} "
                                     f"({ctx.minus.termination})")
    return None


@check("minus.ratio_envelope", "ratio envelope",
       "1 < max s/sqrt(t) < sqrt(2) over (0, 200]")
def _ratio(ctx):
    short = _short_range(ctx, 200.0)
    if short:
        return short
    env = envelope_stats(ctx.minus, (1e-9, 200.0))
    margin = min(env.max_ratio - 1, RATIO_CAP - env.max_ratio)
    return Outcome(_status(margin > 0), margin, f"max ratio {env.max_ratio!r} at t={env.argmax_ratio:.6g}")


@check("minus.decay_envelope", "decay envelope",
       "max |s - sqrt(t)| t^(1/8) does not increase from (10, 100] to (100, 500]")
def _decay(ctx):
    short = _short_range(ctx, 500.0)
    if short:
        return short
    a = envelope_stats(ctx.minus, (10.0, 100.0))
    b = envelope_stats(ctx.minus, (100.0, 500.0))
    return Outcome(_status(b.max_scaled_dev <= a.max_scaled_dev), a.max_scaled_dev - b.max_scaled_dev,
                   f"{a.max_scaled_dev:.6g} -> {b.max_scaled_dev:.6g}")


def run_checks(config: VerifyConfig | None = None, only: list[str] | None = None) -> VerificationReport:
    """Run every registered check (or the ids in *only*) in check-id order."""
    cfg = config or VerifyConfig()
    ctx = VerifyContext(cfg)
    report = VerificationReport(version=__version__, config=asdict(cfg))
    for check_id in sorted(REGISTRY):
        if only is not None and check_id not in only:
            continue
        entry = REGISTRY[check_id]
        try:
            out = entry.run(ctx)
        except Exception as exc:  # infrastructure failure is reported, not raised
            out = Outcome(FAIL, details=f"error: {exc!r} | " + traceback.format_exc(limit=1).strip().splitlines()[-1])
        report.checks.append(CheckRecord(check_id, entry.anchor, out.status,
                                         float(out.worst_margin), out.details))
    return report
