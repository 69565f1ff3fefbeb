"""Adaptive Dormand-Prince 5(4) integration of the triple-zero solution.

The second-order equation is integrated as the first-order system
``(s, s', q)' = (s', rhs(t, s), s)`` where ``q`` accumulates the integral of
``s`` from the origin. Every accepted step keeps the coefficients of the
fourth-order continuous extension, so the trajectory can be evaluated at any
covered time and searched for sign changes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from .series import EquationForm

__all__ = [
    "State",
    "IntegratorConfig",
    "Trajectory",
    "IntegrationError",
    "integrate",
    "dense_eval",
    "sample",
    "find_roots",
]

REACHED_T_MAX = "reached_t_max"
BLOWUP_GUARD = "blowup_guard"
STEP_UNDERFLOW = "step_underflow"

_EPS = np.finfo(float).eps

# Dormand-Prince tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_A71, _A73, _A74, _A75, _A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth-order minus embedded fourth-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                                22 / 525, -1 / 40)
# continuous extension (Hairer, Norsett & Wanner, DOPRI5 dense output)
_D1 = -12715105075 / 11282082432
_D3 = 87487479700 / 32700410799
_D4 = -10690763975 / 1880347072
_D5 = 701980252875 / 199316789632
_D6 = -1453857185 / 822651844
_D7 = 69997945 / 29380423

# step-size controller
_SAFETY = 0.9
_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA
# growth is capped at 5x: the embedded estimate can miss the onset of the
# nonlinear term when leaving the triple zero
_FAC_MIN, _FAC_MAX = 0.2, 5.0


class State(NamedTuple):
    t: float
    s: float
    sdot: float
    q: float


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float = 0.1
    initial_step: float = 1e-3
    s_max: float = 1e8
    t_max: float = 100.0
    root_tol: float = 1e-12

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "initial_step", "s_max", "root_tol"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if self.rel_tol < 10 * _EPS:
            raise ValueError(f"rel_tol must be at least {10 * _EPS:.3g}")
        if not math.isfinite(self.t_max):
            raise ValueError("t_max must be finite")

    def with_(self, **changes) -> "IntegratorConfig":
        return replace(self, **changes)

    def scaled(self, factor: float) -> "IntegratorConfig":
        """Copy with both tolerances multiplied by *factor*."""
        return replace(self, rel_tol=self.rel_tol * factor, abs_tol=self.abs_tol * factor)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Accepted steps of one integration run.

    ``t`` has ``n + 1`` entries and ``y`` has shape ``(n + 1, 3)`` holding
    ``(s, s', q)``; ``dense`` has shape ``(n, 4, 3)`` and ``error`` the
    scaled local error estimate of each step.
    """

    form: EquationForm
    config: IntegratorConfig
    t: np.ndarray
    y: np.ndarray
    dense: np.ndarray
    error: np.ndarray
    termination: str
    direction: float = 1.0
    corrupted: bool = field(default=False)

    @property
    def n_steps(self) -> int:
        return len(self.t) - 1

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    @property
    def coverage(self) -> tuple[float, float]:
        a, b = float(self.t[0]), float(self.t[-1])
        return (a, b) if a <= b else (b, a)

    def state(self, i: int) -> State:
        s, sdot, q = self.y[i]
        return State(float(self.t[i]), float(s), float(sdot), float(q))

    @property
    def final(self) -> State:
        return self.state(-1)

    def covers(self, t: float) -> bool:
        lo, hi = self.coverage
        return lo <= t <= hi

    def steps(self):
        """Yield ``(start State, end State, error)`` per accepted step."""
        for i in range(self.n_steps):
            yield self.state(i), self.state(i + 1), float(self.error[i])


def integrate(form: EquationForm, config: IntegratorConfig | None = None, *,
              rhs: Callable[[float, float], float] | None = None) -> Trajectory:
    """Integrate *form* from the triple-zero data at the origin.

    Integration runs towards ``config.t_max`` (which may be negative) and
    stops early when ``|s| >= config.s_max`` or when the step size underflows.
    *rhs* replaces ``form.rhs`` and exists for negative-control experiments.
    """
    cfg = config or IntegratorConfig()
    f = rhs or form.rhs
    rtol, atol, s_max = cfg.rel_tol, cfg.abs_tol, cfg.s_max
    t_end = float(cfg.t_max)
    d = 1.0 if t_end >= 0 else -1.0

    ts = [0.0]
    ys = [(0.0, 0.0, 0.0)]
    dense: list[tuple] = []
    errs: list[float] = []
    termination = REACHED_T_MAX

    t = 0.0
    s, v, q = 0.0, 0.0, 0.0
    k1 = (v, f(t, s), s)
    h = min(cfg.initial_step, cfg.max_step)
    facold = 1e-4
    rejected = False

    while d * (t_end - t) > 0:
        h = min(h, cfg.max_step)
        if h < 10 * _EPS * abs(t) or h < 1e-300:
            if len(ts) == 1:
                raise IntegrationError(f"step size underflow at t={t!r} before any progress")
            termination = STEP_UNDERFLOW
            break
        last = h >= d * (t_end - t)
        if last:
            h = d * (t_end - t)
        hd = d * h

        ks1, kv1, kq1 = k1
        s2 = s + hd * (_A21 * ks1)
        v2 = v + hd * (_A21 * kv1)
        ks2, kv2, kq2 = v2, f(t + _C2 * hd, s2), s2

        s3 = s + hd * (_A31 * ks1 + _A32 * ks2)
        v3 = v + hd * (_A31 * kv1 + _A32 * kv2)
        ks3, kv3, kq3 = v3, f(t + _C3 * hd, s3), s3

        s4 = s + hd * (_A41 * ks1 + _A42 * ks2 + _A43 * ks3)
        v4 = v + hd * (_A41 * kv1 + _A42 * kv2 + _A43 * kv3)
        ks4, kv4, kq4 = v4, f(t + _C4 * hd, s4), s4

        s5 = s + hd * (_A51 * ks1 + _A52 * ks2 + _A53 * ks3 + _A54 * ks4)
        v5 = v + hd * (_A51 * kv1 + _A52 * kv2 + _A53 * kv3 + _A54 * kv4)
        ks5, kv5, kq5 = v5, f(t + _C5 * hd, s5), s5

        s6 = s + hd * (_A61 * ks1 + _A62 * ks2 + _A63 * ks3 + _A64 * ks4 + _A65 * ks5)
        v6 = v + hd * (_A61 * kv1 + _A62 * kv2 + _A63 * kv3 + _A64 * kv4 + _A65 * kv5)
        ks6, kv6, kq6 = v6, f(t + hd, s6), s6

        sn = s + hd * (_A71 * ks1 + _A73 * ks3 + _A74 * ks4 + _A75 * ks5 + _A76 * ks6)
        vn = v + hd * (_A71 * kv1 + _A73 * kv3 + _A74 * kv4 + _A75 * kv5 + _A76 * kv6)
        qn = q + hd * (_A71 * kq1 + _A73 * kq3 + _A74 * kq4 + _A75 * kq5 + _A76 * kq6)
        tn = t_end if last else t + hd
        k7 = (vn, f(tn, sn), sn)
        ks7, kv7, kq7 = k7

        es = hd * (_E1 * ks1 + _E3 * ks3 + _E4 * ks4 + _E5 * ks5 + _E6 * ks6 + _E7 * ks7)
        ev = hd * (_E1 * kv1 + _E3 * kv3 + _E4 * kv4 + _E5 * kv5 + _E6 * kv6 + _E7 * kv7)
        eq = hd * (_E1 * kq1 + _E3 * kq3 + _E4 * kq4 + _E5 * kq5 + _E6 * kq6 + _E7 * kq7)
        try:
            # max-norm over (s, s', q)
            err = max(abs(es) / (atol + rtol * max(abs(s), abs(sn))),
                      abs(ev) / (atol + rtol * max(abs(v), abs(vn))),
                      abs(eq) / (atol + rtol * max(abs(q), abs(qn))))
        except OverflowError:
            err = math.inf
        if not math.isfinite(err) or not (math.isfinite(sn) and math.isfinite(vn)):
            err = math.inf

        fac11 = err ** _EXPO if math.isfinite(err) else math.inf
        if err <= 1.0:
            facold = max(err, 1e-4)
            y0 = (s, v, q)
            y1 = (sn, vn, qn)
            k1c = (ks1, kv1, kq1)
            kc = (k1c, (ks3, kv3, kq3), (ks4, kv4, kq4), (ks5, kv5, kq5),
                  (ks6, kv6, kq6), k7)
            rc = []
            for j in range(3):
                ydiff = y1[j] - y0[j]
                bspl = hd * k1c[j] - ydiff
                rc.append((ydiff, bspl, ydiff - hd * k7[j] - bspl,
                           hd * (_D1 * kc[0][j] + _D3 * kc[1][j] + _D4 * kc[2][j]
                                 + _D5 * kc[3][j] + _D6 * kc[4][j] + _D7 * kc[5][j])))
            dense.append(rc)
            errs.append(err)
            ts.append(tn)
            ys.append(y1)
            t, s, v, q = tn, sn, vn, qn
            k1 = k7
            if abs(s) >= s_max:
                termination = BLOWUP_GUARD
                break
            fac = fac11 / facold ** _BETA if facold > 0 else fac11
            fac = max(1.0 / _FAC_MAX, min(1.0 / _FAC_MIN, fac / _SAFETY))
            h_new = h / fac
            if rejected:
                h_new = min(h_new, h)
            rejected = False
            h = h_new
        else:
            rejected = True
            if math.isfinite(fac11):
                h = h / min(1.0 / _FAC_MIN, fac11 / _SAFETY)
            else:
                h = h * _FAC_MIN

    t_arr = np.array(ts)
    y_arr = np.array(ys, dtype=float).reshape(-1, 3)
    # stored per step as (component, coefficient); expose as (coefficient, component)
    d_arr = np.array(dense, dtype=float).reshape(-1, 3, 4).transpose(0, 2, 1).copy()
    e_arr = np.array(errs, dtype=float)
    for arr in (t_arr, y_arr, d_arr, e_arr):
        arr.flags.writeable = False
    return Trajectory(form=form, config=cfg, t=t_arr, y=y_arr, dense=d_arr, error=e_arr,
                      termination=termination, direction=d, corrupted=rhs is not None)


def _locate(traj: Trajectory, t: np.ndarray) -> np.ndarray:
    """Index of the step containing each time (clipped to valid steps)."""
    if traj.direction > 0:
        idx = np.searchsorted(traj.t, t, side="right") - 1
    else:
        idx = np.searchsorted(-traj.t, -t, side="right") - 1
    return np.clip(idx, 0, max(traj.n_steps - 1, 0))


def _check_range(traj: Trajectory, t) -> None:
    lo, hi = traj.coverage
    tt = np.asarray(t, dtype=float)
    if tt.size and (np.any(tt < lo) or np.any(tt > hi) or np.any(np.isnan(tt))):
        raise ValueError(f"time outside trajectory coverage [{lo!r}, {hi!r}]")


def sample(traj: Trajectory, times: Sequence[float] | np.ndarray) -> np.ndarray:
    """Dense output at many times; returns an ``(N, 4)`` array of ``t, s, s', q``."""
    tt = np.atleast_1d(np.asarray(times, dtype=float))
    _check_range(traj, tt)
    out = np.empty((tt.size, 4))
    out[:, 0] = tt
    if traj.n_steps == 0:
        out[:, 1:] = traj.y[0]
        return out
    idx = _locate(traj, tt)
    t0 = traj.t[idx]
    h = traj.t[idx + 1] - t0
    theta = ((tt - t0) / h)[:, None]
    theta1 = 1.0 - theta
    rc = traj.dense[idx]
    y = traj.y[idx] + theta * (rc[:, 0] + theta1 * (rc[:, 1] + theta * (rc[:, 2] + theta1 * rc[:, 3])))
    # step endpoints reproduce the stored states exactly
    at_start = tt == t0
    at_end = tt == traj.t[idx + 1]
    y[at_start] = traj.y[idx[at_start]]
    y[at_end] = traj.y[idx[at_end] + 1]
    out[:, 1:] = y
    return out


def dense_eval(traj: Trajectory, t: float) -> State:
    """Interpolated state at time *t*; raises ``ValueError`` outside coverage."""
    lo, hi = traj.coverage
    if not lo <= t <= hi:
        raise ValueError(f"t={t!r} outside trajectory coverage [{lo!r}, {hi!r}]")
    if traj.n_steps == 0:
        return traj.state(0)
    i = int(_locate(traj, np.float64(t)))
    t0, t1 = traj.t[i], traj.t[i + 1]
    if t == t0:
        return traj.state(i)
    if t == t1:
        return traj.state(i + 1)
    theta = (t - t0) / (t1 - t0)
    theta1 = 1.0 - theta
    y0 = traj.y[i]
    rc = traj.dense[i]
    vals = [float(y0[j] + theta * (rc[0, j] + theta1 * (rc[1, j] + theta * (rc[2, j] + theta1 * rc[3, j]))))
            for j in range(3)]
    return State(float(t), *vals)


def _as_state(rows: np.ndarray) -> State:
    return State(rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3])


def find_roots(traj: Trajectory, g: Callable[[State], float], window: tuple[float, float],
               root_tol: float | None = None, subdivisions: int = 4) -> list[float]:
    """Refined roots of ``g(state)`` over accepted steps inside *window*.

    *g* must accept a :class:`State` whose fields are numpy arrays (for the
    coarse scan) as well as floats. Each accepted step is probed at
    ``subdivisions`` sub-intervals; every sign change is refined with Brent's
    method on the dense output. Tangential zeros that do not change sign may
    be missed.
    """
    tol = traj.config.root_tol if root_tol is None else root_tol
    lo, hi = sorted(window)
    c_lo, c_hi = traj.coverage
    lo, hi = max(lo, c_lo), min(hi, c_hi)
    if not lo < hi:
        return []
    knots = np.sort(traj.t)
    inner = knots[(knots > lo) & (knots < hi)]
    if subdivisions > 1:
        grid = np.concatenate([[lo], inner, [hi]])
        frac = np.arange(subdivisions) / subdivisions
        grid = (grid[:-1, None] + np.diff(grid)[:, None] * frac[None, :]).ravel()
        grid = np.append(grid, hi)
    else:
        grid = np.concatenate([[lo], inner, [hi]])
    vals = np.asarray(g(_as_state(sample(traj, grid))), dtype=float)

    def gs(x: float) -> float:
        return float(g(dense_eval(traj, x)))

    roots: list[float] = []
    for i in range(len(grid)):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        if i + 1 < len(grid) and vals[i] * vals[i + 1] < 0:
            roots.append(brentq(gs, grid[i], grid[i + 1], xtol=tol, rtol=4 * _EPS))
    roots.sort()
    deduped: list[float] = []
    for r in roots:
        if not deduped or r - deduped[-1] > tol:
            deduped.append(r)
    return deduped
