"""Blow-up time of the triple-zero solution of ``s'' = 6 s^2 + 6 t``.

For ``tau > 0`` in the domain, ``tau + s(tau)**-0.5`` is already past the
blow-up time, so every integrated state yields a bracket ``[tau, tau + s^-1/2]``.
Closed-form bounds and the bounding integral are evaluated separately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .integrator import IntegratorConfig, Trajectory, integrate
from .quadrature import integrate_adaptive
from .series import EquationForm

__all__ = [
    "BlowupEstimate",
    "bracket_from_state",
    "estimate_blowup",
    "analytic_lower_bound",
    "minimal_upper_bound",
    "bounding_integral",
    "GUARD_LADDER",
]

# guards 10^2, 10^4, ..., each shrinks the bracket tenfold
GUARD_LADDER = tuple(10.0 ** (2 * k) for k in range(1, 11))
DEFAULT_LADDER_DEPTH = 6


@dataclass(frozen=True)
class BlowupEstimate:
    lower: float
    upper: float
    tau_used: float
    s_at_tau: float
    history: tuple[tuple[float, float], ...]
    converged: bool = True
    pole_fit: float = math.nan  # non-certified: linear extrapolation of s^-1/2 to zero
    trajectory: Trajectory | None = field(default=None, repr=False, compare=False)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)


def bracket_from_state(tau: float, s_tau: float) -> tuple[float, float]:
    if not (tau > 0 and s_tau > 0):
        raise ValueError(f"need tau > 0 and s(tau) > 0, got tau={tau!r}, s={s_tau!r}")
    return tau, tau + s_tau ** -0.5


def _guards_for(width_tol: float) -> tuple[float, ...]:
    need = width_tol ** -2
    depth = DEFAULT_LADDER_DEPTH
    while depth < len(GUARD_LADDER) and GUARD_LADDER[depth - 1] < need:
        depth += 1
    return GUARD_LADDER[:depth]


def estimate_blowup(config: IntegratorConfig | None = None,
                    width_tol: float = 1e-2) -> BlowupEstimate:
    """Bracket the blow-up time to within *width_tol*.

    The solution is integrated once up to the largest guard needed; the
    first accepted state past each guard on the ladder yields one bracket.
    The default ladder (guards up to 1e12) is always traversed; it is
    extended only when *width_tol* asks for more.
    If the width cannot be reached (step underflow or ladder exhausted) the
    best bracket is returned with ``converged=False``.
    """
    if not width_tol > 0:
        raise ValueError("width_tol must be positive")
    cfg = config or IntegratorConfig()
    guards = _guards_for(width_tol)
    t_max = max(cfg.t_max, 10.0)
    traj = integrate(EquationForm.PIPLUS, cfg.with_(s_max=guards[-1], t_max=t_max))

    s = traj.y[:, 0]
    history: list[tuple[float, float]] = []
    states: list[tuple[float, float, float]] = []
    for guard in guards:
        hits = np.nonzero(s >= guard)[0]
        if hits.size == 0:
            break
        i = int(hits[0])
        tau, s_tau, sdot = float(traj.t[i]), float(s[i]), float(traj.y[i, 1])
        bracket = bracket_from_state(tau, s_tau)
        history.append(bracket)
        states.append((tau, s_tau, sdot))
    if not history:
        # never reached the first guard: fall back to the last positive state
        i = traj.n_steps
        tau, s_tau, sdot = float(traj.t[i]), float(s[i]), float(traj.y[i, 1])
        if not (tau > 0 and s_tau > 0):
            raise RuntimeError(f"PI+ integration made no usable progress ({traj.termination})")
        history.append(bracket_from_state(tau, s_tau))
        states.append((tau, s_tau, sdot))

    lower = max(b[0] for b in history)
    upper = min(b[1] for b in history)
    tau, s_tau, sdot = states[-1]
    converged = upper - lower <= width_tol
    return BlowupEstimate(lower=lower, upper=upper, tau_used=tau, s_at_tau=s_tau,
                          history=tuple(history), converged=converged,
                          pole_fit=tau + 2.0 * s_tau / sdot, trajectory=traj)


def analytic_lower_bound() -> float:
    """``sqrt(3/2) atan(sqrt(2/3)) + (2/3) log(5/2)``, about 1.4495."""
    return math.sqrt(1.5) * math.atan(math.sqrt(2 / 3)) + (2 / 3) * math.log(2.5)


def minimal_upper_bound() -> float:
    """Minimum over tau of ``tau + tau**-1.5``, attained at ``(3/2)**(2/5)``."""
    return 1.5 ** 0.4 + (2 / 3) ** 0.6


def _inner(r):
    # s = r^3 on (0, 1)
    return 1.0 / ((2.0 / 3.0) * r ** 2.5 + 1.0)


def _tail(u):
    # s = r^2, r = 1/u on (1, inf)
    return 1.0 / (1.0 + 1.5 * u ** (5.0 / 3.0))


def bounding_integral(rel_tol: float = 1e-12) -> float:
    """``integral_0^inf ds / (2 s^(3/2) + 3 s^(2/3))`` by adaptive Gauss-Kronrod."""
    head = integrate_adaptive(_inner, 0.0, 1.0, rel_tol=rel_tol)
    tail = integrate_adaptive(_tail, 0.0, 1.0, rel_tol=rel_tol)
    return head.value + tail.value
