"""Deterministic CSV and JSON writers.

Floats are written with ``repr``: the shortest decimal that round-trips,
never more than 17 significant digits. Non-finite floats become ``null`` in
JSON and ``nan``/``inf`` in CSV. JSON keys keep insertion order and use a
two-space indent with a trailing newline.
"""
from __future__ import annotations

import dataclasses
import enum
import json
import math
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .blowup import BlowupEstimate, analytic_lower_bound, bounding_integral
from .integrator import Trajectory, sample
from .oscillation import CrossingEvent, EnvelopeStats, gap_audit
from .series import SeriesExpansion

__all__ = [
    "fmt_float",
    "to_plain",
    "dumps",
    "trajectory_csv",
    "trajectory_json",
    "series_json",
    "crossing_csv",
    "envelope_json",
    "blowup_json",
]


def fmt_float(x: float) -> str:
    return repr(float(x))


def to_plain(obj: Any) -> Any:
    """Convert dataclasses, enums, numpy values and fractions to JSON types."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, Fraction):
        return {"numerator": obj.numerator, "denominator": obj.denominator}
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_plain(obj), indent=2, allow_nan=False) + "\n"


def _csv(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt_float(v) for v in row))
    return "\n".join(lines) + "\n"


def trajectory_csv(traj: Trajectory, spacing: float | None = None) -> str:
    """``t,s,sdot,q`` at every accepted step, or every *spacing* from the
    start; the final state is always the last row."""
    if spacing is None:
        rows = np.column_stack([traj.t, traj.y])
    else:
        if not spacing > 0:
            raise ValueError("spacing must be positive")
        span = abs(traj.t_end - float(traj.t[0]))
        n = int(math.floor(span / spacing + 1e-9))
        times = float(traj.t[0]) + traj.direction * spacing * np.arange(n + 1)
        times = times[np.abs(times - float(traj.t[0])) < span]
        rows = np.vstack([sample(traj, times), np.concatenate([[traj.t_end], traj.y[-1]])])
    return _csv(("t", "s", "sdot", "q"), rows.tolist())


def trajectory_json(traj: Trajectory) -> str:
    """Every accepted step with both end states, its local error estimate and
    the four dense-output coefficient vectors."""
    steps = []
    for i in range(traj.n_steps):
        steps.append({
            "t0": traj.t[i], "t1": traj.t[i + 1],
            "y0": traj.y[i], "y1": traj.y[i + 1],
            "error": traj.error[i],
            "dense": traj.dense[i],
        })
    return dumps({
        "form": traj.form,
        "config": traj.config,
        "termination": traj.termination,
        "n_steps": traj.n_steps,
        "final": traj.final._asdict(),
        "steps": steps,
    })


def series_json(series: SeriesExpansion) -> str:
    return series.to_json() + "\n"


def crossing_csv(events: Sequence[CrossingEvent]) -> str:
    """``index,t,direction,gap_to_prev,bound,passed``; the first row has empty
    gap, bound and passed fields."""
    records = gap_audit(events)
    rows = []
    for k, ev in enumerate(events):
        if k == 0:
            rows.append((str(ev.index), ev.t, ev.direction, "", "", ""))
        else:
            rec = records[k - 1]
            rows.append((str(ev.index), ev.t, ev.direction, rec.gap, rec.bound_value,
                         "true" if rec.passed else "false"))
    return _csv(("index", "t", "direction", "gap_to_prev", "bound", "passed"), rows)


def envelope_json(stats: Sequence[EnvelopeStats]) -> str:
    return dumps(list(stats))


def blowup_json(est: BlowupEstimate) -> str:
    return dumps({
        "lower": est.lower,
        "upper": est.upper,
        "tau": est.tau_used,
        "s_at_tau": est.s_at_tau,
        "width": est.width,
        "converged": est.converged,
        "analytic_lower": analytic_lower_bound(),
        "integral_bound": bounding_integral(),
        "pole_fit": est.pole_fit,
        "history": [list(b) for b in est.history],
    })
