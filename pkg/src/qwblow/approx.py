"""Matched approximate solution and its interior-equation residual.

The approximation glues the exact linear radial wave onto the slow-time
profile with smooth cutoffs:

    u_a(t, r) = eps*chi(eps t) w0(t, r)
              + (eps/r) (1 - chi(eps t)) chi(-3 eps q) V(q, tau),

with q = r - t, tau = eps*ln(1+t).  The linear part w0 comes from the exact
radial d'Alembert formula for r*w0 with evenly extended data; the profile
part from the characteristic fan.  The residual

    J_a = d_t^2 u_a - (1 + u_a + d_t u_a) Lap u_a

is the quantity whose smallness makes u_a useful; its time- and
eps-scalings are measured by probes, not proved here.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field as dc_field

import numpy as np

from .characteristics import CharacteristicFan, characteristic_fan
from .data import RadialProfile
from .errors import InputError
from .lifespan import tau0 as tau0_estimate
from .radiation import RadiationField, radiation_field, tail_integral

__all__ = [
    "cutoff_chi",
    "linear_wave",
    "linear_wave_full",
    "ApproxSolution",
    "u_approx",
    "residual_ja",
    "ja_scaling_probe",
]

ChiValue = namedtuple("ChiValue", "value d1 d2")
LinearWave = namedtuple("LinearWave", "w0 dt dr")
LinearWaveFull = namedtuple("LinearWaveFull", "w0 dt dr dtt dtr drr")
ApproxValue = namedtuple("ApproxValue", "value dt dr dtt dtr drr")


def cutoff_chi(x):
    """Smooth glue: 1 for x <= 1, 0 for x >= 2, exponential blend between.

    chi(x) = p/(p+m) with p = exp(-1/(2-x)), m = exp(-1/(x-1)); returns
    (value, d1, d2), all C-infinity and symmetric about x = 3/2.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    val = np.zeros_like(x_arr)
    d1 = np.zeros_like(x_arr)
    d2 = np.zeros_like(x_arr)
    val[x_arr <= 1.0] = 1.0
    mid = (x_arr > 1.0) & (x_arr < 2.0)
    if np.any(mid):
        xm = x_arr[mid]
        yp = 2.0 - xm
        ym = xm - 1.0
        p = np.exp(-1.0 / yp)
        m = np.exp(-1.0 / ym)
        dp = -p / yp**2
        dm = m / ym**2
        ddp = p / yp**4 - 2.0 * p / yp**3
        ddm = m / ym**4 - 2.0 * m / ym**3
        den = p + m
        num = dp * m - p * dm
        val[mid] = p / den
        d1[mid] = num / den**2
        dnum = ddp * m - p * ddm
        dden2 = 2.0 * den * (dp + dm)
        d2[mid] = (dnum * den**2 - num * dden2) / den**4
    if np.ndim(x) == 0:
        return ChiValue(float(val[0]), float(d1[0]), float(d2[0]))
    return ChiValue(val, d1, d2)


def _d_alembert(u0: RadialProfile, u1: RadialProfile, t, r, quad_tol=1e-12):
    """U = r*w0 for the radial linear wave, with first and second derivatives.

    U(t,r) = [(r+t) u0(r+t) + (r-t) u0(r-t)]/2 + [T(r-t) - T(r+t)]/2 with
    T the tail integral of sigma*u1; everything uses the even extension of
    the data, so the formula is valid for all r > 0, t >= 0.
    """
    t_arr = np.asarray(t, dtype=float)
    r_arr = np.asarray(r, dtype=float)
    p = r_arr + t_arr
    m = r_arr - t_arr

    def yu0(y):
        return y * u0.value(y)

    def D(y):
        return u0.value(y) + y * u0.d1(y)

    def Dp(y):
        return 2.0 * u0.d1(y) + y * u0.d2(y)

    def E(y):
        return u1.value(y) + y * u1.d1(y)

    def T(y):
        y_flat = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.array([tail_integral(u1, float(v), quad_tol) for v in y_flat])
        return out.reshape(np.shape(y)) if np.ndim(y) else float(out[0])

    def yu1(y):
        return y * u1.value(y)

    U = 0.5 * (yu0(p) + yu0(m)) + 0.5 * (T(m) - T(p))
    Ur = 0.5 * (D(p) + D(m)) + 0.5 * (yu1(p) - yu1(m))
    Ut = 0.5 * (D(p) - D(m)) + 0.5 * (yu1(p) + yu1(m))
    Urr = 0.5 * (Dp(p) + Dp(m)) + 0.5 * (E(p) - E(m))
    Utr = 0.5 * (Dp(p) - Dp(m)) + 0.5 * (E(p) + E(m))
    # Utt = Urr (1-D wave equation for U)
    return U, Ut, Ur, Urr, Utr


def linear_wave_full(u0: RadialProfile, u1: RadialProfile, t, r, quad_tol=1e-12):
    """w0 with first and second derivatives at (t, r), r > 0."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise InputError("linear_wave requires r > 0")
    U, Ut, Ur, Urr, Utr = _d_alembert(u0, u1, t, r, quad_tol)
    w0 = U / r_arr
    dt = Ut / r_arr
    dr = Ur / r_arr - U / r_arr**2
    dtt = Urr / r_arr
    dtr = Utr / r_arr - Ut / r_arr**2
    drr = Urr / r_arr - 2.0 * Ur / r_arr**2 + 2.0 * U / r_arr**3
    return LinearWaveFull(w0, dt, dr, dtt, dtr, drr)


def linear_wave(u0: RadialProfile, u1: RadialProfile, t, r, quad_tol=1e-12):
    """(w0, d_t w0, d_r w0) for the linear radial wave with data (u0, u1)."""
    full = linear_wave_full(u0, u1, t, r, quad_tol)
    return LinearWave(full.w0, full.dt, full.dr)


@dataclass
class ApproxSolution:
    """Evaluator for u_a and its residual; caches characteristic fans per tau."""

    u0: RadialProfile
    u1: RadialProfile
    epsilon: float
    fan_n: int = 4001
    tau_step: float = 1e-3     # stencil for d_tau^2 V
    quad_tol: float = 1e-12
    field: RadiationField = None
    tau0_ref: float = None
    _fans: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.epsilon < 0:
            raise InputError("epsilon must be nonnegative")
        if self.field is None:
            self.field = radiation_field(self.u0, self.u1, self.quad_tol)
        if self.tau0_ref is None:
            if self.field.is_trivial:
                self.tau0_ref = np.inf
            else:
                self.tau0_ref = tau0_estimate(self.field, grid_n=20001).tau0

    def fan(self, tau: float) -> CharacteristicFan:
        key = float(tau)
        if key not in self._fans:
            self._fans[key] = characteristic_fan(self.field, key, n=self.fan_n)
        return self._fans[key]

    def profile_terms(self, q, tau):
        """V and the derivatives needed for second-order chain rules at (q, tau)."""
        mid = self.fan(tau).eval(q)
        h = self.tau_step
        tau_lo = max(tau - h, 0.0)
        vt_p = self.fan(tau + h).eval(q)["dtauV"]
        vt_m = self.fan(tau_lo).eval(q)["dtauV"]
        mid["dtau2V"] = (vt_p - vt_m) / (h + (tau - tau_lo))
        return mid


def u_approx(apx: ApproxSolution, t: float, r):
    """u_a and derivatives at time t and radii r (scalar t, scalar or array r)."""
    eps = apx.epsilon
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr <= 0):
        raise InputError("u_approx requires r > 0")
    tau = eps * np.log1p(t)
    if tau >= apx.tau0_ref:
        raise InputError(f"tau={tau} is past the profile lifetime tau0={apx.tau0_ref}")

    out = {k: np.zeros_like(r_arr) for k in ("value", "dt", "dr", "dtt", "dtr", "drr")}

    # linear piece, present while chi(eps t) > 0
    c0, c1, c2 = cutoff_chi(eps * t)
    if eps == 0.0 or c0 > 0.0 or c1 != 0.0 or c2 != 0.0:
        lw = linear_wave_full(apx.u0, apx.u1, t, r_arr, apx.quad_tol)
        out["value"] += eps * c0 * lw.w0
        out["dt"] += eps * (eps * c1 * lw.w0 + c0 * lw.dt)
        out["dr"] += eps * c0 * lw.dr
        out["dtt"] += eps * (eps**2 * c2 * lw.w0 + 2.0 * eps * c1 * lw.dt + c0 * lw.dtt)
        out["dtr"] += eps * (eps * c1 * lw.dr + c0 * lw.dtr)
        out["drr"] += eps * c0 * lw.drr

    # profile piece, present while 1 - chi(eps t) > 0
    A = eps * (1.0 - c0)
    dA = -(eps**2) * c1
    ddA = -(eps**3) * c2
    if eps > 0.0 and (A > 0.0 or dA != 0.0 or ddA != 0.0):
        q = r_arr - t
        tau_t = eps / (1.0 + t)
        tau_tt = -eps / (1.0 + t) ** 2
        b0, b1, b2 = cutoff_chi(-3.0 * eps * q)
        Bq = -3.0 * eps * b1
        Bqq = 9.0 * eps**2 * b2
        pv = apx.profile_terms(q, tau)
        V, Vq, Vqq = pv["V"], pv["dqV"], pv["d2qV"]
        Vt, Vqt, Vtt = pv["dtauV"], pv["dqtauV"], pv["dtau2V"]
        W = b0 * V
        Wq = Bq * V + b0 * Vq
        Wqq = Bqq * V + 2.0 * Bq * Vq + b0 * Vqq
        Wt = b0 * Vt
        Wqt = Bq * Vt + b0 * Vqt
        Wtt = b0 * Vtt
        inv_r = 1.0 / r_arr
        ut_core = -Wq + tau_t * Wt
        out["value"] += A * W * inv_r
        out["dt"] += (dA * W + A * ut_core) * inv_r
        out["dtt"] += (
            ddA * W
            + 2.0 * dA * ut_core
            + A * (Wqq - 2.0 * tau_t * Wqt + tau_t**2 * Wtt + tau_tt * Wt)
        ) * inv_r
        out["dr"] += A * Wq * inv_r - A * W * inv_r**2
        out["drr"] += A * Wqq * inv_r - 2.0 * A * Wq * inv_r**2 + 2.0 * A * W * inv_r**3
        out["dtr"] += (dA * Wq + A * (-Wqq + tau_t * Wqt)) * inv_r - (dA * W + A * ut_core) * inv_r**2

    if np.ndim(r) == 0:
        return ApproxValue(*(float(out[k][0]) for k in ApproxValue._fields))
    return ApproxValue(*(out[k] for k in ApproxValue._fields))


def residual_ja(apx: ApproxSolution, t: float, r):
    """Pointwise J_a = d_t^2 u_a - (1 + u_a + d_t u_a)(d_r^2 + (2/r) d_r) u_a."""
    r_arr = np.asarray(r, dtype=float)
    ua = u_approx(apx, t, r)
    lap = ua.drr + 2.0 / r_arr * ua.dr
    return ua.dtt - (1.0 + ua.value + ua.dt) * lap


def ja_scaling_probe(apx: ApproxSolution, t_list, n_r: int = 2001):
    """sup_r |J_a(t, .)| over the residual's support shell, and its time slope.

    Returns (slope, sups) where slope is the least-squares slope of
    log sup|J_a| against log(1+t).
    """
    eps = apx.epsilon
    if eps <= 0:
        raise InputError("ja_scaling_probe requires epsilon > 0")
    M = apx.field.M
    sups = []
    for t in t_list:
        q = np.linspace(-2.0 / (3.0 * eps) - 0.5, M + 0.2, n_r)
        r = t + q
        r = r[r > 0.5 * t]
        sups.append(float(np.max(np.abs(residual_ja(apx, float(t), r)))))
    sups = np.asarray(sups)
    slope = float(np.polyfit(np.log1p(np.asarray(t_list, float)), np.log(sups), 1)[0])
    return slope, sups
