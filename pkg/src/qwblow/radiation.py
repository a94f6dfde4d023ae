"""Friedlander radiation field of compactly supported radial data.

For data (u0, u1) supported in [-M, M],

    F(s) = (su0(s) + integral_s^inf sigma*u1(sigma) dsigma) / 2,

with F' and F'' obtained by closed-form differentiation:

    F'(s)  = (u0 + s u0' - s u1) / 2
    F''(s) = (2 u0' + s u0'' - u1 - s u1') / 2.

All three vanish identically outside [-M, M]: su0 by support, and the tail
integral because sigma*u1(sigma) is odd.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import RadialProfile
from .errors import InputError, QuadratureError

__all__ = ["RadiationField", "radiation_field", "tail_integral"]

_SIMPSON_MAX_DEPTH = 40


def _adaptive_simpson(f, a, b, tol, fa, fm, fb, whole, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth >= _SIMPSON_MAX_DEPTH:
        raise QuadratureError(f"adaptive Simpson hit max depth on [{a}, {b}]")
    if abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return _adaptive_simpson(f, a, m, tol / 2, fa, flm, fm, left, depth + 1) + _adaptive_simpson(
        f, m, b, tol / 2, fm, frm, fb, right, depth + 1
    )


def adaptive_simpson(f, a, b, tol=1e-12):
    """Integrate a smooth scalar function on [a, b] to absolute tolerance tol."""
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _adaptive_simpson(f, a, b, tol, fa, fm, fb, whole, 0)


def tail_integral(u1: RadialProfile, s: float, tol: float = 1e-12) -> float:
    """integral_s^inf sigma*u1(sigma) dsigma, exact zero outside the support.

    For s <= -M the full integral vanishes because sigma*u1 is odd; for
    s >= M the integrand has left the support.
    """
    M = u1.M
    if u1.is_zero or s >= M:
        return 0.0
    lo = max(s, -M)
    val = adaptive_simpson(lambda x: x * u1.value(x), lo, M, tol)
    if s <= -M:
        return 0.0
    return val


@dataclass(frozen=True)
class RadiationField:
    """F and its first two derivatives; immutable, safe to share."""

    u0: RadialProfile
    u1: RadialProfile
    M: float
    quad_tol: float = 1e-12

    def F(self, s):
        if np.ndim(s) == 0:
            return 0.5 * (float(s) * self.u0.value(s) + tail_integral(self.u1, float(s), self.quad_tol))
        s = np.asarray(s, dtype=float)
        tails = np.array([tail_integral(self.u1, x, self.quad_tol) for x in s])
        return 0.5 * (s * self.u0.value(s) + tails)

    def dF(self, s):
        s_arr = np.asarray(s, dtype=float)
        out = 0.5 * (self.u0.value(s_arr) + s_arr * self.u0.d1(s_arr) - s_arr * self.u1.value(s_arr))
        return out if np.ndim(s) else float(out)

    def d2F(self, s):
        s_arr = np.asarray(s, dtype=float)
        out = 0.5 * (
            2.0 * self.u0.d1(s_arr)
            + s_arr * self.u0.d2(s_arr)
            - self.u1.value(s_arr)
            - s_arr * self.u1.d1(s_arr)
        )
        return out if np.ndim(s) else float(out)

    @property
    def is_trivial(self) -> bool:
        return self.u0.is_zero and self.u1.is_zero

    def scaled(self, factor: float) -> "RadiationField":
        return RadiationField(self.u0.scaled(factor), self.u1.scaled(factor), self.M, self.quad_tol)


def radiation_field(u0: RadialProfile, u1: RadialProfile, quad_tol: float = 1e-12) -> RadiationField:
    """Build the radiation field of (u0, u1); the supports must agree."""
    if u0.M != u1.M:
        raise InputError(f"support radii differ: u0.M={u0.M}, u1.M={u1.M}")
    if not quad_tol > 0:
        raise InputError("quadrature tolerance must be positive")
    return RadiationField(u0=u0, u1=u1, M=u0.M, quad_tol=quad_tol)
