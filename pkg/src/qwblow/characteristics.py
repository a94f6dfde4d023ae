"""Slow-time profile V(q, tau) by explicit characteristics.

The reduced profile equation

    2 d_{q tau} V + (V - d_q V) d_q^2 V = 0,   V(q, 0) = F(q),  V|_{q=M} = 0,

is solved by a fan of characteristics labelled by the starting point s:

    d_s q(tau, s) = exp(a) - F''(s) * (tau/2) * phi(a),      a = F'(s) tau / 2,
    q(tau, s)     = M + integral_M^s d_s q(tau, rho) d rho,
    V(q(tau,s))   = F'(s) + integral_M^s exp(a(rho)) (F'(rho) - F''(rho)) d rho,

where phi(a) = (e^a - 1)/a.  This form of d_s q is an exact algebraic
rearrangement of exp(a)(1 - F''/F') + F''/F' that stays finite through
F' = 0, where it reduces to 1 - tau F''/2.

Along each characteristic d_q V = F'(s) is constant and
d_q^2 V = F''(s) / d_s q; the first tau where d_s q vanishes is the fold
(gradient catastrophe) of that characteristic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FoldError, InputError
from .lifespan import tau_unified
from .radiation import RadiationField

__all__ = ["CharacteristicFan", "dq_ds", "characteristic_fan", "invert_s", "fold_time", "pde_residual"]

# 4-point Gauss-Legendre on [-1, 1]
_GL_X = np.array([
    -0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526,
])
_GL_W = np.array([
    0.34785484513745385, 0.6521451548625461, 0.6521451548625461, 0.34785484513745385,
])


def _phi(a):
    """(e^a - 1)/a, equal to 1 at a = 0."""
    a = np.asarray(a, dtype=float)
    safe = np.where(a == 0.0, 1.0, a)
    out = np.where(a == 0.0, 1.0, np.expm1(safe) / safe)
    return out


def dq_ds(field: RadiationField, tau: float, s):
    """d_s q(tau, s): the stretching factor of the characteristic fan."""
    if tau < 0:
        raise InputError("dq_ds requires tau >= 0")
    s_arr = np.asarray(s, dtype=float)
    a = 0.5 * field.dF(s_arr) * tau
    out = np.exp(a) - field.d2F(s_arr) * (0.5 * tau) * _phi(a)
    return out if np.ndim(s) else float(out)


def _v_integrand(field, tau, rho):
    d1 = field.dF(rho)
    return np.exp(0.5 * d1 * tau) * (d1 - field.d2F(rho))


def _i2_integrand(field, tau, rho):
    d1 = field.dF(rho)
    return 0.5 * d1 * np.exp(0.5 * d1 * tau) * (d1 - field.d2F(rho))


def _cell_gl4(f, lo, hi):
    """Vectorized 4-point Gauss-Legendre over cells [lo_i, hi_i]."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    acc = 0.0
    for x, w in zip(_GL_X, _GL_W):
        acc = acc + w * f(mid + half * x)
    return half * acc


@dataclass(frozen=True)
class CharacteristicFan:
    """Parametric profile data at fixed slow time tau.

    Node arrays are indexed by the strictly increasing parameter grid s;
    q is strictly increasing as long as tau is below the first fold.
    """

    field: RadiationField
    tau: float
    s: np.ndarray        # characteristic labels, ascending, s[-1] = M
    q: np.ndarray        # retarded coordinate q(tau, s)
    V: np.ndarray        # profile value along the characteristic
    w: np.ndarray        # d_q V = F'(s)
    d2V: np.ndarray      # d_q^2 V = F''(s) / d_s q  (inf where the fan folded)
    dsq: np.ndarray      # d_s q
    dVdtau_s: np.ndarray  # dV/dtau at fixed label s

    @property
    def monotone(self) -> bool:
        return bool(np.all(self.dsq > 0.0))

    # continuous (partial-cell) evaluation ---------------------------------

    def q_of_s(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty_like(s_arr)
        above = s_arr >= self.s[-1]
        below = s_arr <= self.s[0]
        out[above] = self.q[-1] + (s_arr[above] - self.s[-1])
        out[below] = self.q[0] + (s_arr[below] - self.s[0])
        mid = ~(above | below)
        if np.any(mid):
            sm = s_arr[mid]
            j = np.clip(np.searchsorted(self.s, sm) - 1, 0, self.s.size - 2)
            part = _cell_gl4(lambda rho: dq_ds(self.field, self.tau, rho), self.s[j], sm)
            out[mid] = self.q[j] + part
        return out if np.ndim(s) else float(out[0])

    def _suffix_eval(self, s, nodes, integrand):
        """nodes[j] + partial-cell integral from s[j] to s (handles both tails)."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty_like(s_arr)
        above = s_arr >= self.s[-1]
        below = s_arr <= self.s[0]
        out[above] = nodes[-1]
        out[below] = nodes[0]
        mid = ~(above | below)
        if np.any(mid):
            sm = s_arr[mid]
            j = np.clip(np.searchsorted(self.s, sm) - 1, 0, self.s.size - 2)
            part = _cell_gl4(lambda rho: integrand(self.field, self.tau, rho), self.s[j], sm)
            out[mid] = nodes[j] + part
        return out if np.ndim(s) else float(out[0])

    def V_integral_of_s(self, s):
        """integral_M^s exp(a)(F' - F'') d rho, continuous in s."""
        return self._suffix_eval(s, self.V - self.w, _v_integrand)

    def I2_of_s(self, s):
        """dV/dtau at fixed label: integral_M^s (F'/2) exp(a)(F' - F'') d rho."""
        return self._suffix_eval(s, self.dVdtau_s, _i2_integrand)

    def eval(self, q):
        """Profile quantities at retarded coordinates q (fixed tau).

        Returns a dict with V, dqV, d2qV, dtauV, dqtauV arrays.  Points with
        q > M are in the vacuum region and return zeros; points left of
        q(tau, s_min) are on the flat tail (possible only when s_min <= -M,
        where V is constant in q) and return the tail values.
        """
        q_arr = np.atleast_1d(np.asarray(q, dtype=float))
        M = self.field.M
        out = {k: np.zeros_like(q_arr) for k in ("V", "dqV", "d2qV", "dtauV", "dqtauV")}
        below = q_arr < self.q[0]
        if np.any(below):
            if self.s[0] > -M or self.w[0] != 0.0 or self.field.d2F(self.s[0]) != 0.0:
                raise InputError(
                    f"q below fan range [{self.q[0]}, {self.q[-1]}] and s_min={self.s[0]} "
                    "is not in the flat region s <= -M"
                )
            out["V"][below] = self.V[0]
            out["dtauV"][below] = self.dVdtau_s[0]
        inside = (q_arr <= self.q[-1]) & ~below
        if np.any(inside):
            s = invert_s(self, q_arr[inside])
            d1 = self.field.dF(s)
            dsq = dq_ds(self.field, self.tau, s)
            if np.any(dsq <= 0.0):
                raise FoldError(f"fan folded at tau={self.tau}: d_s q <= 0 inside the queried range")
            V = d1 + self.V_integral_of_s(s)
            w = d1
            d2V = self.field.d2F(s) / dsq
            dtauV = self.I2_of_s(s) - 0.5 * w * (V - w)
            out["V"][inside] = V
            out["dqV"][inside] = w
            out["d2qV"][inside] = d2V
            out["dtauV"][inside] = dtauV
            out["dqtauV"][inside] = -0.5 * (V - w) * d2V
        if np.ndim(q) == 0:
            return {k: float(v[0]) for k, v in out.items()}
        return out


def characteristic_fan(field: RadiationField, tau: float, s_min: float | None = None,
                       n: int = 2001) -> CharacteristicFan:
    """Build the fan at slow time tau on n nodes between s_min and M.

    s_min defaults to -M - 2 so that queries slightly left of the data
    support (where V is constant in s) stay inside the fan.
    """
    if tau < 0:
        raise InputError("characteristic_fan requires tau >= 0")
    if n < 2:
        raise InputError("characteristic_fan requires n >= 2")
    M = field.M
    if s_min is None:
        s_min = -M - 2.0
    if s_min >= M:
        raise InputError(f"s_min must lie below M, got {s_min} >= {M}")

    s = np.linspace(s_min, M, n)
    lo, hi = s[:-1], s[1:]

    cell_q = _cell_gl4(lambda rho: dq_ds(field, tau, rho), lo, hi)
    cell_v = _cell_gl4(lambda rho: _v_integrand(field, tau, rho), lo, hi)
    cell_i2 = _cell_gl4(lambda rho: _i2_integrand(field, tau, rho), lo, hi)

    def suffix(cells):
        out = np.zeros(n)
        out[:-1] = -np.cumsum(cells[::-1])[::-1]
        return out

    q = M + suffix(cell_q)
    d1 = field.dF(s)
    V = d1 + suffix(cell_v)
    i2 = suffix(cell_i2)
    dsq = dq_ds(field, tau, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        d2V = np.where(dsq > 0.0, field.d2F(s) / np.where(dsq > 0.0, dsq, 1.0),
                       np.sign(field.d2F(s)) * np.inf)
    return CharacteristicFan(field=field, tau=tau, s=s, q=q, V=V, w=d1, d2V=d2V,
                             dsq=dsq, dVdtau_s=i2)


def invert_s(fan: CharacteristicFan, q, tol_factor: float = 1e-12, max_iter: int = 60):
    """Solve q(tau, s) = q for s, by monotone interpolation plus Newton.

    Requires the fan to be monotone (tau below the first fold) and q within
    [q(s_min), M + extension].
    """
    if not fan.monotone:
        raise FoldError(f"fan at tau={fan.tau} is folded (d_s q <= 0 somewhere); cannot invert")
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    M = fan.field.M
    if np.any(q_arr < fan.q[0] - 1e-12) or np.any(q_arr > fan.q[-1] + 1e-12):
        raise InputError(
            f"q outside fan range [{fan.q[0]}, {fan.q[-1]}] at tau={fan.tau}"
        )
    s = np.interp(q_arr, fan.q, fan.s)
    tol = tol_factor * M
    for _ in range(max_iter):
        resid = fan.q_of_s(s) - q_arr
        if np.all(np.abs(resid) <= tol):
            break
        deriv = dq_ds(fan.field, fan.tau, s)
        step = resid / np.where(deriv > 0.0, deriv, 1.0)
        s = np.clip(s - step, fan.s[0], fan.s[-1])
    else:
        raise FoldError(f"invert_s did not reach |dq| <= {tol} at tau={fan.tau}")
    return s if np.ndim(q) else float(s[0])


def coarse_tau0_estimate(field: RadiationField, n: int = 1001) -> float:
    """First finite grid estimate of tau0, used to cap fold searches."""
    s = np.linspace(-field.M, field.M, n + 2)[1:-1]
    t = tau_unified(field, s)
    if np.all(np.isnan(t)):
        raise FoldError("no admissible point found for the fold-time cap")
    return float(np.nanmin(t))


def fold_time(field: RadiationField, s, tau_cap: float | None = None):
    """Smallest tau > 0 with d_s q(tau, s) = 0, or +inf if none up to tau_cap.

    Found by bisection between 0 (where d_s q = 1) and tau_cap.  Vectorized
    over s.
    """
    if tau_cap is None:
        tau_cap = 10.0 * coarse_tau0_estimate(field)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    d1 = field.dF(s_arr)
    d2 = field.d2F(s_arr)

    def g(tau):
        a = 0.5 * d1 * tau
        return np.exp(a) - d2 * (0.5 * tau) * _phi(a)

    has_root = g(np.full_like(s_arr, tau_cap)) <= 0.0
    lo = np.zeros_like(s_arr)
    hi = np.full_like(s_arr, tau_cap)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        pos = g(mid) > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    out = np.where(has_root, 0.5 * (lo + hi), np.inf)
    return out if np.ndim(s) else float(out[0])


def pde_residual(field: RadiationField, tau: float, q_grid, h: float,
                 fan_n: int = 2001) -> float:
    """Max-norm residual of the profile equation on q_grid at slow time tau.

    The mixed derivative is a centered difference of d_q V at fixed q over
    [tau - h, tau + h]; the remaining factors are evaluated on the tau fan.
    Returns max |2 D_tau(d_q V) + (V - d_q V) d_q^2 V|.
    """
    if h <= 0:
        raise InputError("pde_residual requires h > 0")
    if tau - h < 0:
        raise InputError("stencil leaves tau >= 0")
    q_arr = np.asarray(q_grid, dtype=float)
    fan_m = characteristic_fan(field, tau - h, n=fan_n)
    fan_0 = characteristic_fan(field, tau, n=fan_n)
    fan_p = characteristic_fan(field, tau + h, n=fan_n)
    for f in (fan_m, fan_0, fan_p):
        if not f.monotone:
            raise FoldError(f"fold encountered within the stencil at tau={f.tau}")
    w_m = fan_m.eval(q_arr)["dqV"]
    w_p = fan_p.eval(q_arr)["dqV"]
    mid = fan_0.eval(q_arr)
    resid = 2.0 * (w_p - w_m) / (2.0 * h) + (mid["V"] - mid["dqV"]) * mid["d2qV"]
    return float(np.max(np.abs(resid)))
