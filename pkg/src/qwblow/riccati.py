"""Riccati comparison certificate and its brute-force verification oracle.

For w' = a0(t) w^2 + a1(t) w + a2(t) with a0 >= 0 on [0, T] and

    K = (int_0^T |a2|) * exp(int_0^T |a1|),

a solution that exists on all of (0, T) with w(0) > K must satisfy

    (int_0^T a0) * exp(-int_0^T |a1|) < 1 / (w(0) - K),

so the reverse inequality certifies blowup strictly before T.  The module
also applies the certificate along a tracked outgoing characteristic of a
wave run, where

    w_hat(t) = -w1(t) * exp(-int L2u/(4c^2)),
    a0 = exp(+int L2u/(4c^2)) / (4 r c),
    a1 = (w2 + d_t u) / (4 r c),
    a2 = exp(-int L2u/(4c^2)) * (w2/(4 r c)) (d_t u + (r/c) L2u),

turning the measured fields into an upper lifespan bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, RunFailure
from .radiation import adaptive_simpson

__all__ = [
    "RiccatiInstance",
    "BoundReport",
    "riccati_bound",
    "riccati_integrate",
    "certify_from_run",
]


@dataclass(frozen=True)
class RiccatiInstance:
    """w' = a0 w^2 + a1 w + a2 on [0, T] with w(0) = w0; a_j are callables."""

    T: float
    w0: float
    a0: object
    a1: object
    a2: object

    def __post_init__(self):
        if not self.T > 0:
            raise InputError("horizon T must be positive")

    @classmethod
    def from_samples(cls, t, a0_vals, a1_vals, a2_vals, w0):
        t = np.asarray(t, float)
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
            raise InputError("sample times must be strictly increasing")
        mk = lambda v: (lambda x, tt=t, vv=np.asarray(v, float): np.interp(x, tt, vv))
        return cls(T=float(t[-1] - t[0]), w0=float(w0),
                   a0=mk(a0_vals), a1=mk(a1_vals), a2=mk(a2_vals))


@dataclass(frozen=True)
class BoundReport:
    K: float
    lhs: float          # (int a0) exp(-int |a1|)
    rhs: float          # 1/(w0 - K)
    certified: bool     # lhs >= rhs, i.e. no solution lives on all of (0, T)
    w0: float
    T: float


def _check_a0_nonneg(inst: RiccatiInstance, n_probe: int = 512):
    t = np.linspace(0.0, inst.T, n_probe)
    vals = np.asarray(inst.a0(t), float)
    if np.any(vals < -1e-12 * max(1.0, float(np.max(np.abs(vals))))):
        raise InputError("a0 must be nonnegative on [0, T]")


def riccati_bound(inst: RiccatiInstance, quad_tol: float = 1e-10) -> BoundReport:
    """Evaluate the comparison certificate for one instance."""
    _check_a0_nonneg(inst)
    int_a0 = adaptive_simpson(lambda t: float(inst.a0(t)), 0.0, inst.T, quad_tol)
    int_a1 = adaptive_simpson(lambda t: abs(float(inst.a1(t))), 0.0, inst.T, quad_tol)
    int_a2 = adaptive_simpson(lambda t: abs(float(inst.a2(t))), 0.0, inst.T, quad_tol)
    K = int_a2 * np.exp(int_a1)
    lhs = int_a0 * np.exp(-int_a1)
    if inst.w0 <= K:
        return BoundReport(K=K, lhs=lhs, rhs=np.inf, certified=False, w0=inst.w0, T=inst.T)
    rhs = 1.0 / (inst.w0 - K)
    return BoundReport(K=K, lhs=lhs, rhs=rhs, certified=bool(lhs >= rhs), w0=inst.w0, T=inst.T)


# Dormand-Prince 5(4) tableau
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)


def riccati_integrate(inst: RiccatiInstance, rtol: float = 1e-8, atol: float = 1e-10,
                      blow_mag: float = 1e12):
    """Brute-force adaptive integration; returns (blowup time or None, final w).

    Blowup is declared when |w| exceeds blow_mag while the accepted step has
    collapsed below 1e-12*T; the returned time brackets the singularity from
    below.  Returns (None, w(T)) when the solution survives to T.
    """

    def f(t, w):
        return float(inst.a0(t)) * w * w + float(inst.a1(t)) * w + float(inst.a2(t))

    t, w = 0.0, float(inst.w0)
    h = min(1e-3 * inst.T, 1.0)
    h_min = 1e-12 * inst.T
    while t < inst.T:
        h = min(h, inst.T - t)
        k = []
        for i in range(7):
            ti = t + _DP_C[i] * h
            wi = w + h * sum(a * kk for a, kk in zip(_DP_A[i], k))
            if not np.isfinite(wi):
                return t, w
            k.append(f(ti, wi))
        w5 = w + h * sum(b * kk for b, kk in zip(_DP_B5, k))
        w4 = w + h * sum(b * kk for b, kk in zip(_DP_B4, k))
        err = abs(w5 - w4)
        scale = atol + rtol * max(abs(w), abs(w5))
        if err <= scale or h <= h_min:
            t += h
            w = w5
            if abs(w) > blow_mag:
                return t, w
            if not np.isfinite(w):
                return t, w
        grow = 0.9 * (scale / err) ** 0.2 if err > 0 else 5.0
        h *= min(5.0, max(0.2, grow))
        if h < h_min:
            h = h_min
    return None, w


def certify_from_run(run_result, field, rho0: float, mu: float, epsilon: float,
                     tau0_ref: float, fan_n: int = 4001) -> dict:
    """Apply the certificate along the tracked outgoing path of a finished run.

    Extracts w1, w2, d_t u, L2u, c, r along the rho0 characteristic, seeds
    w_hat at t_eps = exp(mu*tau0/eps) - 1, forms the coefficient integrals by
    trapezoid on the recorded samples, and returns the smallest recorded time
    at which the bound certifies blowup, together with the seed-consistency
    data against the profile fan.
    """
    from .characteristics import characteristic_fan, dq_ds, invert_s

    if not 0 < mu < 1:
        raise InputError("mu must lie in (0, 1)")
    eps = float(epsilon)
    if eps <= 0:
        raise InputError("certify_from_run needs epsilon > 0")
    path = run_result.paths.get("rho0")
    if path is None or path["t"].size < 8:
        raise RunFailure("run carries no usable rho0 path record")
    t_eps = float(np.exp(mu * tau0_ref / eps) - 1.0)
    t = path["t"]
    if t[0] > t_eps or t[-1] <= t_eps:
        raise RunFailure(f"path data does not cover t_eps={t_eps:.3f} (span [{t[0]:.3f}, {t[-1]:.3f}])")

    sel = t >= t_eps
    # prepend the interpolated sample exactly at t_eps
    def col(name):
        arr = path[name]
        head = np.interp(t_eps, t, arr)
        return np.concatenate([[head], arr[sel]])

    tt = np.concatenate([[t_eps], t[sel]])
    w1 = col("w1")
    w2 = col("w2")
    dtu = col("dtu")
    L2u = col("L2u")
    c = col("c")
    r = col("r")

    # I(t) = int_{t_eps}^t L2u/(4 c^2)
    integrand = L2u / (4.0 * c**2)
    I = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(tt))])
    a0 = np.exp(I) / (4.0 * r * c)
    a1 = (w2 + dtu) / (4.0 * r * c)
    a2 = np.exp(-I) * (w2 / (4.0 * r * c)) * (dtu + (r / c) * L2u)
    w_hat0 = -w1[0]

    def cum(vals):
        return np.concatenate([[0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(tt))])

    int_a0 = cum(a0)
    int_a1 = cum(np.abs(a1))
    int_a2 = cum(np.abs(a2))
    K = int_a2 * np.exp(int_a1)
    lhs = int_a0 * np.exp(-int_a1)
    out = {
        "t_eps": t_eps,
        "w_hat0": float(w_hat0),
        "K_end": float(K[-1]),
        "certified": False,
        "bound": None,
        "eps_ln_bound": None,
    }

    # seed consistency against the profile fan
    fan = characteristic_fan(field, mu * tau0_ref, n=fan_n)
    q_path = r[0] - t_eps
    s_of_q = invert_s(fan, float(np.clip(q_path, fan.q[0], fan.q[-1])))
    dsq = dq_ds(field, mu * tau0_ref, rho0)
    seed_pred = field.d2F(rho0) / dsq
    out["seed_measured"] = float(w_hat0 / (2.0 * eps))
    out["seed_predicted"] = float(seed_pred)
    out["seed_rel_err"] = float(abs(out["seed_measured"] - seed_pred) / abs(seed_pred))
    out["q_at_t_eps"] = float(q_path)
    out["s_of_q"] = float(s_of_q)

    if w_hat0 <= K[-1] and w_hat0 <= np.min(K[1:]):
        return out          # no certificate at this epsilon; reported, not fatal
    ok = (w_hat0 > K) & (lhs >= 1.0 / np.maximum(w_hat0 - K, 1e-300))
    ok[0] = False
    if np.any(ok):
        j = int(np.argmax(ok))
        out["certified"] = True
        out["bound"] = float(tt[j])
        out["eps_ln_bound"] = float(eps * np.log(tt[j]))
    return out
