"""Lifespan functional and its minimum.

The slow-time blowup scale of the quasilinear wave equation is

    tau0 = min over admissible s of  tau~(s) = (2 / F''(s)) * g(-F'(s)/F''(s)),

with g(z) = ln(1+z)/z.  A point is admissible iff F''(s) > 0 and
F''(s) - F'(s) > 0; on that set the single expression above reproduces both
the F' != 0 branch (2/F') ln(F''/(F''-F')) and the F' = 0 branch 2/F''.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NoAdmissiblePointError, TrivialDataError
from .radiation import RadiationField

__all__ = ["g_log_ratio", "tau_unified", "tau0", "LifespanEstimate"]

_SERIES_SWITCH = 1e-4
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def g_log_ratio(z):
    """ln(1+z)/z, continued through z=0 by a 4-term series for |z| < 1e-4.

    Continuous, positive, strictly decreasing on (-1, inf).
    """
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr <= -1.0):
        raise InputError("g_log_ratio requires z > -1")
    small = np.abs(z_arr) < _SERIES_SWITCH
    # avoid 0/0 in the masked-out branch
    z_safe = np.where(small, 1.0, z_arr)
    direct = np.log1p(z_safe) / z_safe
    series = 1.0 - z_arr / 2.0 + z_arr**2 / 3.0 - z_arr**3 / 4.0
    out = np.where(small, series, direct)
    return out if np.ndim(z) else float(out)


def tau_unified(field: RadiationField, s):
    """tau~(s), or NaN where the point is inadmissible (F'' <= 0 or F''-F' <= 0).

    NaN is a value here, not a failure: inadmissible points are simply
    outside the minimization domain.
    """
    s_arr = np.asarray(s, dtype=float)
    d1 = field.dF(s_arr)
    d2 = field.d2F(s_arr)
    ok = (d2 > 0.0) & (d2 - d1 > 0.0)
    d2_safe = np.where(ok, d2, 1.0)
    z = np.where(ok, -d1 / d2_safe, 0.0)
    out = np.where(ok, (2.0 / d2_safe) * g_log_ratio(z), np.nan)
    return out if np.ndim(s) else float(out)


@dataclass(frozen=True)
class LifespanEstimate:
    tau0: float
    s_star: float
    branch: str                 # 'A', 'B', or 'A_limit'
    admissible_intervals: tuple
    grid_n: int

    def as_dict(self) -> dict:
        return {"tau0": self.tau0, "s_star": self.s_star, "branch": self.branch}


def _golden_min(f, lo, hi, tol):
    """Golden-section minimum of a scalar function on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


def tau0(field: RadiationField, grid_n: int = 100001, refine: float = 1e-12) -> LifespanEstimate:
    """Scan tau~ on a uniform grid over (-M, M), then golden-refine the minimum.

    refine is the s-interval tolerance of the golden-section stage, as a
    fraction of M.
    """
    if field.is_trivial:
        raise TrivialDataError("trivial data: u0 and u1 vanish identically")
    if grid_n < 1001:
        raise InputError(f"grid_n must be at least 1001, got {grid_n}")
    M = field.M
    s = np.linspace(-M, M, grid_n + 2)[1:-1]
    tau = tau_unified(field, s)
    admissible = np.isfinite(tau)
    if not np.any(admissible):
        raise NoAdmissiblePointError(
            f"no admissible point at resolution {grid_n}: F''>0 and F''-F'>0 hold nowhere on the grid"
        )

    intervals = []
    idx = np.flatnonzero(admissible)
    start = idx[0]
    for i, j in zip(idx[:-1], idx[1:]):
        if j != i + 1:
            intervals.append((float(s[start]), float(s[i])))
            start = j
    intervals.append((float(s[start]), float(s[idx[-1]])))

    i_min = int(np.nanargmin(tau))
    # golden-section within the bracketing cell, restricted to admissible ground
    lo = s[i_min - 1] if i_min > 0 and admissible[i_min - 1] else s[i_min]
    hi = s[i_min + 1] if i_min < s.size - 1 and admissible[i_min + 1] else s[i_min]
    at_edge = lo == s[i_min] or hi == s[i_min]

    def objective(x):
        v = tau_unified(field, x)
        return v if np.isfinite(v) else np.inf

    if lo < hi:
        s_star, t_star = _golden_min(objective, lo, hi, refine * M)
        if not np.isfinite(t_star) or t_star > tau[i_min]:
            s_star, t_star = float(s[i_min]), float(tau[i_min])
    else:
        s_star, t_star = float(s[i_min]), float(tau[i_min])

    d1_max = float(np.max(np.abs(field.dF(s))))
    d1_star = abs(field.dF(s_star))
    if at_edge:
        branch = "A_limit"
    elif d1_max > 0 and d1_star < 1e-8 * d1_max:
        branch = "B"
    else:
        branch = "A"
    return LifespanEstimate(
        tau0=float(t_star),
        s_star=float(s_star),
        branch=branch,
        admissible_intervals=tuple(intervals),
        grid_n=grid_n,
    )
