"""Oscillation of the triple-zero solution of ``s'' = 6 t - 6 s^2`` about the
square root.

The deviation ``f = s - sqrt(t)`` satisfies ``f'' = phi - Phi f`` with
``phi = 1 / (4 t^1.5)`` and ``Phi = 6 (sqrt(t) + s)``. Comparison with
``g'' + lam g = 0`` bounds the time between consecutive crossings of ``s``
and ``sqrt(t)`` from above on intervals where ``s`` lies below the square
root and from below on intervals where it lies above.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .integrator import State, Trajectory, dense_eval, find_roots, sample
from .quadrature import integrate_adaptive
from .series import EquationForm, taylor_coefficients

__all__ = [
    "CrossingEvent",
    "GapRecord",
    "EnvelopeStats",
    "ProbeCheck",
    "BoundsReport",
    "crossings",
    "first_integral_residual",
    "bounds_audit",
    "exact_squeeze_margins",
    "gap_audit",
    "deviation_residual",
    "comparison_identity",
    "envelope_stats",
    "below_gap_bound",
    "above_gap_bound",
    "SQUEEZE_LIMIT",
    "CROSSING_EPS",
]

CROSSING_EPS = 1e-6
# t^3 - (3/28) t^8 > 0 below this point
SQUEEZE_LIMIT = (28 / 3) ** 0.2
_EPS = np.finfo(float).eps

BELOW_KIND = "upper_below"
ABOVE_KIND = "lower_above"


def _require_pi_minus(traj: Trajectory) -> None:
    if traj.form is not EquationForm.PIMINUS:
        raise ValueError(f"expected a pi-minus trajectory, got {traj.form.value}")


@dataclass(frozen=True)
class CrossingEvent:
    t: float
    direction: str  # "upward" or "downward"
    index: int
    refinement_width: float


@dataclass(frozen=True)
class GapRecord:
    a: float
    b: float
    side: str  # "below" or "above"
    gap: float
    bound_value: float
    bound_kind: str
    margin: float  # positive when the bound holds

    @property
    def passed(self) -> bool:
        return self.margin > 0


@dataclass(frozen=True)
class EnvelopeStats:
    window: tuple[float, float]
    max_ratio: float
    max_scaled_dev: float
    samples: int
    argmax_ratio: float = math.nan


def below_gap_bound(a: float) -> float:
    """Strict upper bound on ``b - a`` when ``s < sqrt`` on ``(a, b)``."""
    return math.pi / math.sqrt(6.0) * a ** -0.25


def above_gap_bound(b: float) -> float:
    """Strict lower bound on ``b - a`` when ``s > sqrt`` on ``(a, b)``."""
    return math.pi / math.sqrt(6.0 * (1.0 + math.sqrt(3.0))) * b ** -0.25


def _deviation(st: State):
    return st.s - np.sqrt(st.t)


def crossings(traj: Trajectory, t_max: float | None = None) -> list[CrossingEvent]:
    """All sign changes of ``s - sqrt(t)`` on ``(CROSSING_EPS, t_max]``."""
    _require_pi_minus(traj)
    hi = traj.coverage[1] if t_max is None else t_max
    if hi > traj.coverage[1]:
        raise ValueError(f"t_max={hi!r} beyond trajectory coverage {traj.coverage[1]!r}")
    tol = traj.config.root_tol
    roots = find_roots(traj, _deviation, (CROSSING_EPS, hi), root_tol=tol)
    events = []
    for k, r in enumerate(roots):
        st = dense_eval(traj, r)
        slope = st.sdot - 0.5 / math.sqrt(r)
        events.append(CrossingEvent(t=r, direction="upward" if slope > 0 else "downward",
                                    index=k, refinement_width=tol))
    return events


def first_integral_residual(traj: Trajectory, t):
    """``s'^2 + 4 s^3 + 12 q - 12 t s`` from the dense output (scalar or array)."""
    _require_pi_minus(traj)
    rows = sample(traj, np.atleast_1d(t))
    tt, s, sd, q = rows.T
    res = sd * sd + 4.0 * s ** 3 + 12.0 * q - 12.0 * tt * s
    return float(res[0]) if np.ndim(t) == 0 else res


@dataclass
class ProbeCheck:
    """Outcome of one inequality over a set of probes.

    A probe is resolved when ``|margin|`` exceeds its uncertainty band;
    unresolved probes count neither as passes nor as violations.
    """

    name: str
    checked: int = 0
    passed: int = 0
    unresolved: int = 0
    violations: list[tuple[float, float]] = field(default_factory=list)
    worst_margin: float = math.inf
    unresolved_at: list[float] = field(default_factory=list)

    def add(self, t: float, margin: float, band: float) -> None:
        self.checked += 1
        if margin > band:
            self.passed += 1
            self.worst_margin = min(self.worst_margin, margin)
        elif margin < -band:
            self.violations.append((t, margin))
            self.worst_margin = min(self.worst_margin, margin)
        else:
            self.unresolved += 1
            self.unresolved_at.append(t)

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class BoundsReport:
    checks: dict[str, ProbeCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks.values())

    def __getitem__(self, key: str) -> ProbeCheck:
        return self.checks[key]


# global error of s stays within this multiple of the local tolerance on
# the squeeze window (checked against the exact series in the tests)
ERROR_BAND_FACTOR = 20.0


def _band(value: np.ndarray, bound: np.ndarray, err: np.ndarray) -> np.ndarray:
    return err + 8.0 * _EPS * np.maximum(np.abs(value), np.abs(bound))


def bounds_audit(traj: Trajectory, probes: Sequence[float],
                 companion: Trajectory | None = None,
                 band_factor: float = ERROR_BAND_FACTOR) -> BoundsReport:
    """Check positivity, ``s^2 < 3 t`` and the polynomial squeezes at *probes*.

    Each probe carries an uncertainty band of ``band_factor`` times the
    local tolerance ``abs_tol + rel_tol |s|`` plus rounding. A companion
    trajectory, if given, widens the band by four times the difference
    between the two runs. Set ``band_factor=0`` for a rounding-only band.
    """
    _require_pi_minus(traj)
    t = np.asarray(probes, dtype=float)
    if np.any(t <= 0):
        raise ValueError("probes must be positive")
    rows = sample(traj, t)
    s = rows[:, 1]
    cfg = traj.config
    err = band_factor * (cfg.abs_tol + cfg.rel_tol * np.abs(s))
    if companion is not None:
        err = err + 4.0 * np.abs(s - sample(companion, t)[:, 1])

    checks = {name: ProbeCheck(name) for name in
              ("positivity", "sqrt3t", "cubic_upper", "squeeze_lower", "refined_upper")}
    zero = np.zeros_like(s)
    three_t = 3.0 * t
    # s^2 < 3t is the two-sided form of s < sqrt(3t)
    checks_data = [
        ("positivity", s, zero, np.ones_like(t, dtype=bool)),
        ("sqrt3t", np.sqrt(three_t) - np.abs(s), zero, np.ones_like(t, dtype=bool)),
    ]
    cubic = t ** 3
    lower = cubic - (3 / 28) * t ** 8
    refined = lower + (3 / 364) * t ** 13 - (3 / 13328) * t ** 18
    inside = t < SQUEEZE_LIMIT
    for name, margin, ref, mask in checks_data:
        band = _band(s, ref, err)
        for i in np.nonzero(mask)[0]:
            checks[name].add(float(t[i]), float(margin[i]), float(band[i]))
    for name, margin, ref in (("cubic_upper", cubic - s, cubic),
                              ("squeeze_lower", s - lower, lower),
                              ("refined_upper", refined - s, refined)):
        band = _band(s, ref, err)
        for i in np.nonzero(inside)[0]:
            checks[name].add(float(t[i]), float(margin[i]), float(band[i]))
    return BoundsReport(checks)


def exact_squeeze_margins(t: float | Fraction, order: int = 103) -> dict[str, tuple[Fraction, Fraction]]:
    """Squeeze margins from the exact Taylor series, in rational arithmetic.

    Returns ``{name: (margin, tail_bound)}`` where ``tail_bound`` is the
    magnitude of the first omitted series term. The series alternates in
    sign with shrinking terms for ``t`` below ``SQUEEZE_LIMIT``, so the
    truncation error is below that term; a margin is established when it
    exceeds its tail bound.
    """
    x = Fraction(t)
    if not 0 < x < Fraction(SQUEEZE_LIMIT):
        raise ValueError("exact squeeze margins need 0 < t < (28/3)^(1/5)")
    ser = taylor_coefficients(EquationForm.PIMINUS, order + 5)
    terms = [(n, a) for n, a in ser.nonzero()]
    partial = sum((a * x ** n for n, a in terms if n <= order), Fraction(0))
    n_next, a_next = next((n, a) for n, a in terms if n > order)
    tail = abs(a_next) * x ** n_next
    mags = [abs(a) * x ** n for n, a in terms]
    if any(m2 >= m1 for m1, m2 in zip(mags, mags[1:])):
        raise ValueError(f"series terms are not decreasing at t={float(x)!r}")
    cubic = x ** 3
    lower = cubic - Fraction(3, 28) * x ** 8
    refined = lower + Fraction(3, 364) * x ** 13 - Fraction(3, 13328) * x ** 18
    return {
        "positivity": (partial, tail),
        "cubic_upper": (cubic - partial, tail),
        "squeeze_lower": (partial - lower, tail),
        "refined_upper": (refined - partial, tail),
    }


def gap_audit(events: Sequence[CrossingEvent]) -> list[GapRecord]:
    """One record per consecutive pair of crossings.

    Every interval between two crossings has both ends on the square root,
    so intervals above it are audited against the lower bound and intervals
    below it against the upper bound.
    """
    records = []
    for left, right in zip(events, events[1:]):
        a, b = left.t, right.t
        gap = b - a
        if left.direction == "upward":
            bound = above_gap_bound(b)
            records.append(GapRecord(a, b, "above", gap, bound, ABOVE_KIND, gap - bound))
        else:
            bound = below_gap_bound(a)
            records.append(GapRecord(a, b, "below", gap, bound, BELOW_KIND, bound - gap))
    return records


def deviation_residual(traj: Trajectory, t: float) -> float:
    """``f'' - (phi - Phi f)`` at *t*, with ``s''`` taken from the equation."""
    if not t > 0:
        raise ValueError("deviation residual needs t > 0")
    _require_pi_minus(traj)
    st = dense_eval(traj, t)
    rt = math.sqrt(t)
    sdd = 6.0 * t - 6.0 * st.s * st.s
    fdd = sdd + 0.25 * t ** -1.5
    phi = 0.25 / (t * rt)
    big_phi = 6.0 * (rt + st.s)
    return fdd - (phi - big_phi * (st.s - rt))


def comparison_identity(traj: Trajectory, a: float, b: float,
                        lam: float | None = None, rel_tol: float = 1e-11) -> tuple[float, float]:
    """Both sides of the comparison identity on ``[a, b]``.

    With ``g = sin(sqrt(lam) (t - a))`` returns
    ``(int_a^b (phi + (lam - Phi) f) g dt, [f' g - f g']_a^b)``, which agree
    for the exact solution. *lam* defaults to ``(pi / (b - a))^2``.
    """
    _require_pi_minus(traj)
    if not 0 < a < b:
        raise ValueError("need 0 < a < b")
    lam = (math.pi / (b - a)) ** 2 if lam is None else lam
    w = math.sqrt(lam)

    def integrand(x):
        rows = sample(traj, x)
        s = rows[:, 1]
        rt = np.sqrt(x)
        f = s - rt
        return (0.25 / (x * rt) + (lam - 6.0 * (rt + s)) * f) * np.sin(w * (x - a))

    left = integrate_adaptive(integrand, a, b, rel_tol=rel_tol, abs_tol=1e-14).value

    def boundary(x):
        st = dense_eval(traj, x)
        f = st.s - math.sqrt(x)
        fd = st.sdot - 0.5 / math.sqrt(x)
        return fd * math.sin(w * (x - a)) - f * w * math.cos(w * (x - a))

    return left, boundary(b) - boundary(a)


def _chunks(n: int, size: int) -> Iterable[slice]:
    for start in range(0, n, size):
        yield slice(start, min(start + size, n))


def envelope_stats(traj: Trajectory, window: tuple[float, float],
                   samples_per_step: int = 64) -> EnvelopeStats:
    """Scan the dense output over *window* at ``samples_per_step`` points per
    accepted step for ``max s / sqrt(t)`` and ``max |s - sqrt(t)| t^(1/8)``."""
    _require_pi_minus(traj)
    lo, hi = window
    c_lo, c_hi = traj.coverage
    if not (c_lo <= lo < hi <= c_hi):
        raise ValueError(f"window {window!r} outside coverage {traj.coverage!r}")
    knots = traj.t[(traj.t > lo) & (traj.t < hi)]
    edges = np.concatenate([[lo], knots, [hi]])
    frac = (np.arange(samples_per_step) + 1.0) / samples_per_step
    max_ratio, arg_ratio, max_dev, count = -math.inf, math.nan, -math.inf, 0
    for sl in _chunks(len(edges) - 1, 4096):
        a = edges[:-1][sl]
        h = np.diff(edges)[sl]
        tt = (a[:, None] + h[:, None] * frac[None, :]).ravel()
        # the open left end of the window is never sampled
        tt = tt[tt > lo]
        rows = sample(traj, np.minimum(tt, hi))
        s = rows[:, 1]
        rt = np.sqrt(tt)
        ratio = s / rt
        k = int(np.argmax(ratio))
        if ratio[k] > max_ratio:
            max_ratio, arg_ratio = float(ratio[k]), float(tt[k])
        max_dev = max(max_dev, float(np.max(np.abs(s - rt) * tt ** 0.125)))
        count += tt.size
    return EnvelopeStats(window=(lo, hi), max_ratio=max_ratio, max_scaled_dev=max_dev,
                         samples=count, argmax_ratio=arg_ratio)
