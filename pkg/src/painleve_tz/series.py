"""Equation forms of the first Painlevé equation and the exact Taylor
expansion of the triple-zero solution at the origin.

All three forms share the shape ``s'' = c2 * s**2 + c1 * t``; they differ
only in the coefficient pair and are related by the real scaling
``W(z) = beta * w(alpha * z)``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "EquationForm",
    "SeriesExpansion",
    "SeriesRangeError",
    "taylor_coefficients",
    "eval_series",
    "convert_form",
    "scaling",
    "DEFAULT_ORDER",
    "MAX_ORDER",
    "TRUST_RADIUS",
    "residual_polynomial",
    "residual_low_degree",
]

DEFAULT_ORDER = 28
MAX_ORDER = 4000
TRUST_RADIUS = 0.8


class EquationForm(enum.Enum):
    """The three real forms ``s'' = c2 s^2 + c1 t``."""

    PI = "pi"
    PIPLUS = "pi-plus"
    PIMINUS = "pi-minus"

    @property
    def c2(self) -> int:
        return -6 if self is EquationForm.PIMINUS else 6

    @property
    def c1(self) -> int:
        return 1 if self is EquationForm.PI else 6

    def rhs(self, t: float, s: float) -> float:
        return self.c2 * s * s + self.c1 * t

    @classmethod
    def parse(cls, text: str) -> "EquationForm":
        key = text.strip().lower().replace("_", "-")
        aliases = {"pi+": "pi-plus", "piplus": "pi-plus", "pi-": "pi-minus", "piminus": "pi-minus"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown equation form {text!r}; expected one of "
                             f"{', '.join(f.value for f in cls)}") from None


class SeriesRangeError(ValueError):
    """Raised when a truncated series is evaluated outside its trust radius."""


@dataclass(frozen=True)
class SeriesExpansion:
    form: EquationForm
    order: int
    coeffs: tuple[Fraction, ...]

    def nonzero(self) -> list[tuple[int, Fraction]]:
        return [(n, a) for n, a in enumerate(self.coeffs) if a != 0]

    def to_json(self) -> str:
        """Nonzero coefficients as ``[{n, numerator, denominator}, ...]``."""
        entries = [{"n": n, "numerator": a.numerator, "denominator": a.denominator}
                   for n, a in self.nonzero()]
        return json.dumps(entries, separators=(",", ":"))


def taylor_coefficients(form: EquationForm, order: int = DEFAULT_ORDER) -> SeriesExpansion:
    """Exact coefficients ``a_0..a_order`` of the triple-zero solution of *form*.

    Matching powers of ``t^n`` in ``s'' = c2 s^2 + c1 t`` gives
    ``(n+2)(n+1) a_{n+2} = c1 [n == 1] + c2 * sum_{i+j=n} a_i a_j``
    with ``a_0 = a_1 = 0``.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if order > MAX_ORDER:
        raise ValueError(f"order {order} exceeds the cap of {MAX_ORDER}")
    c1, c2 = Fraction(form.c1), Fraction(form.c2)
    a = [Fraction(0)] * (order + 1)
    for m in range(2, order + 1):
        n = m - 2
        # a_i vanishes for i < 3, so only 3 <= i <= n - 3 contributes
        conv = sum((a[i] * a[n - i] for i in range(3, n - 2)), Fraction(0))
        a[m] = (c2 * conv + (c1 if n == 1 else 0)) / (m * (m - 1))
    return SeriesExpansion(form, order, tuple(a))


def eval_series(series: SeriesExpansion, t: float,
                trust_radius: float = TRUST_RADIUS) -> tuple[float, float]:
    """Evaluate the truncated series and its derivative by Horner's rule."""
    if not abs(t) <= trust_radius:
        raise SeriesRangeError(f"|t| = {abs(t)} exceeds the trust radius {trust_radius}")
    coeffs = [float(c) for c in series.coeffs]
    s = 0.0
    for c in reversed(coeffs):
        s = s * t + c
    ds = 0.0
    for n in range(len(coeffs) - 1, 0, -1):
        ds = ds * t + n * coeffs[n]
    return s, ds


def _real_fifth_root(x: float) -> float:
    return math.copysign(abs(x) ** 0.2, x)


def scaling(src: EquationForm, dst: EquationForm) -> tuple[float, float]:
    """Return ``(alpha, beta)`` such that ``beta * w(alpha * z)`` solves *dst*
    whenever ``w`` solves *src*."""
    if src is dst:
        return 1.0, 1.0
    # beta W'' = c2 alpha^2 W^2 + c1 alpha^3 beta^2 z, matched term by term
    ratio = Fraction(dst.c1 * dst.c2, src.c1 * src.c2)
    alpha = _real_fifth_root(float(ratio))
    for k in (1, -1):
        if ratio == k:
            alpha = float(k)
    beta = alpha * alpha * src.c2 / dst.c2
    return alpha, beta


def convert_form(t: float, s: float, sdot: float, src: EquationForm,
                 dst: EquationForm) -> tuple[float, float, float]:
    """Map a state ``(t, s, s')`` of *src* onto the matching state of *dst*."""
    if src is dst:
        return t, s, sdot
    alpha, beta = scaling(src, dst)
    return t / alpha, beta * s, beta * alpha * sdot


def residual_polynomial(series: SeriesExpansion) -> list[Fraction]:
    """Coefficients of ``p'' - c2 p^2 - c1 t`` for the truncated series ``p``,
    computed by direct polynomial arithmetic rather than the recurrence."""
    a = series.coeffs
    n = len(a)
    out = [Fraction(0)] * (2 * n)
    for k in range(2, n):
        out[k - 2] += k * (k - 1) * a[k]
    for i in range(n):
        if a[i]:
            for j in range(n):
                if a[j]:
                    out[i + j] -= series.form.c2 * a[i] * a[j]
    out[1] -= series.form.c1
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def residual_low_degree(series: SeriesExpansion) -> int | None:
    """Lowest degree with a nonzero residual coefficient, or None if exact."""
    for k, c in enumerate(residual_polynomial(series)):
        if c != 0:
            return k
    return None
