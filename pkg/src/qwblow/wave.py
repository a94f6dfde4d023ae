"""Explicit solver for the reduced radial wave equation and blowup detection.

The radial unknowns are U = r*u on a staggered grid r_i = (i + 1/2) dr; the
equation is

    d_t^2 U = c^2 d_r^2 U,      c^2 = 1 + u + d_t u,

stepped by a two-level leapfrog with the time derivative in c^2 lagged one
step.  The inner boundary uses an odd-reflection ghost (U(0) = 0); the outer
boundary is exact vacuum beyond the light cone.  Blowup is operationalized
as threshold crossings of max|w1|, w1 = (d_t - c d_r) d_r U, extrapolated in
1/threshold; hyperbolicity loss (c^2 below a floor) and NaNs terminate runs
as secondary detectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import RadialProfile
from .errors import InputError, RunFailure

__all__ = [
    "WaveState",
    "init_state",
    "step",
    "riemann_quantities",
    "RiemannFields",
    "MonitorRecord",
    "BlowupReport",
    "RunResult",
    "run_to_blowup",
    "track_characteristic",
]


class WaveState:
    """Mutable two-level solver state; advanced in place by step()."""

    def __init__(self, u0: RadialProfile, u1: RadialProfile, epsilon: float, dr: float,
                 R_max: float, cfl: float = 0.8, c2_floor: float = 0.25,
                 frozen_c: float | None = None):
        if dr <= 0:
            raise InputError("dr must be positive")
        if R_max < u0.M + 2 * dr:
            raise InputError(f"R_max={R_max} too small for data of support {u0.M}")
        if not 0 < cfl < 1:
            raise InputError("cfl must lie in (0, 1)")
        self.u0 = u0
        self.u1 = u1
        self.epsilon = float(epsilon)
        self.dr = float(dr)
        self.cfl = float(cfl)
        self.c2_floor = float(c2_floor)
        self.frozen_c2 = None if frozen_c is None else float(frozen_c) ** 2
        self.t = 0.0
        self.n_steps = 0

        n = int(np.ceil(R_max / dr))
        self.r = (np.arange(n) + 0.5) * dr
        self.inv_r = 1.0 / self.r
        self.U = self.epsilon * self.r * u0.value(self.r)
        # Taylor start: U(-dt) = U0 - dt*eps*r*u1 + dt^2/2 * c0^2 * U0''
        u0_r = u0.value(self.r)
        u1_r = u1.value(self.r)
        c2_0 = self.frozen_c2 if self.frozen_c2 is not None else 1.0 + self.epsilon * (u0_r + u1_r)
        lap0 = self._laplacian(self.U)
        c_hi = float(np.sqrt(np.max(c2_0))) if np.ndim(c2_0) else float(np.sqrt(c2_0))
        dt0 = cfl * dr / max(c_hi, 1e-12)
        self.U_prev = self.U - dt0 * self.epsilon * self.r * u1_r + 0.5 * dt0**2 * c2_0 * lap0
        self.dt_prev = dt0
        self.dt = dt0

        self.c2 = np.ones(n)
        self._lap = np.zeros(n)
        self._tmp = np.zeros(n)
        self._front = u0.M + 4 * dr       # wave support certainly inside r < front
        self.c_hi_seen = max(c_hi, 1.0)
        self.min_c2_last = float(np.min(c2_0)) if np.ndim(c2_0) else float(c2_0)
        # comoving window: nodes left of r = t - window_q are frozen (quiet tail)
        self.window_q = None
        self._frozen_upto = 0

    # -- helpers -----------------------------------------------------------

    def _laplacian(self, U):
        """Second difference with odd-reflection ghost at r=0, vacuum above."""
        lap = np.zeros_like(U)
        lap[1:-1] = U[2:] - 2.0 * U[1:-1] + U[:-2]
        lap[0] = U[1] - 3.0 * U[0]
        lap[-1] = U[-2] - 2.0 * U[-1]
        return lap / self.dr**2

    @property
    def n_active(self) -> int:
        return min(self.U.size, int(self._front / self.dr) + 2)

    @property
    def i_low(self) -> int:
        """First evolving node; 0 unless a comoving window is active."""
        if self.window_q is None:
            return 0
        return max(0, int((self.t - self.window_q) / self.dr))

    @property
    def r_grid(self):
        return self.r

    def grow(self, factor: float = 1.6):
        """Extend the grid with vacuum nodes (amortized reallocation)."""
        n_old = self.U.size
        n_new = int(n_old * factor) + 16
        pad = np.arange(n_old, n_new)
        self.r = np.concatenate([self.r, (pad + 0.5) * self.dr])
        self.inv_r = 1.0 / self.r
        for name in ("U", "U_prev", "c2", "_lap", "_tmp"):
            arr = getattr(self, name)
            fill = 1.0 if name == "c2" else 0.0
            setattr(self, name, np.concatenate([arr, np.full(n_new - n_old, fill)]))


def init_state(u0: RadialProfile, u1: RadialProfile, epsilon: float, dr: float,
               R_max: float, **kw) -> WaveState:
    """Sample the data on the staggered grid and synthesize the back level."""
    return WaveState(u0, u1, epsilon, dr, R_max, **kw)


def step(state: WaveState) -> WaveState:
    """Advance one leapfrog step in place.

    Raises RunFailure on hyperbolicity loss (c^2 <= floor) or NaN; callers
    that want a termination cause instead should check min_c2/NaN first via
    the run loop.
    """
    cause = _step_kernel(state)
    if cause is not None:
        raise RunFailure(f"step terminated: {cause} at t={state.t}")
    return state


def _step_kernel(state: WaveState):
    """One leapfrog step; returns None or a termination cause string."""
    if state.n_active + 2 > state.U.size:
        state.grow()
    n = min(state.n_active, state.U.size)
    i0 = state.i_low
    if i0 > state._frozen_upto:
        # sync both levels on newly frozen nodes so they hold still hereafter
        state.U_prev[state._frozen_upto:i0] = state.U[state._frozen_upto:i0]
        state._frozen_upto = i0
    U = state.U[i0:n]
    Up = state.U_prev[i0:n]
    c2 = state.c2[i0:n]
    lap = state._lap[i0:n]
    tmp = state._tmp[i0:n]

    if state.frozen_c2 is not None:
        c2[:] = state.frozen_c2
        min_c2 = state.frozen_c2
        cmax = np.sqrt(state.frozen_c2)
    else:
        # c2 = 1 + (U + (U - Up)/dt_prev) / r
        np.subtract(U, Up, out=tmp)
        tmp /= state.dt_prev
        tmp += U
        np.multiply(tmp, state.inv_r[i0:n], out=c2)
        c2 += 1.0
        min_c2 = float(np.min(c2))
        if np.isnan(min_c2):
            return "NaN"
        if min_c2 <= state.c2_floor:
            state.min_c2_last = min_c2
            return "hyperbolicity-loss"
        cmax = float(np.sqrt(np.max(c2)))
    state.min_c2_last = min_c2

    dt = state.cfl * state.dr / cmax
    rho = dt / state.dt_prev
    coef = 0.5 * dt * (dt + state.dt_prev) / state.dr**2

    # lap <- second difference; inner closure is the odd-reflection ghost at
    # the axis, or the frozen tail node when a comoving window is active
    np.add(U[2:], U[:-2], out=lap[1:-1])
    lap[1:-1] -= U[1:-1]
    lap[1:-1] -= U[1:-1]
    if i0 == 0:
        lap[0] = U[1] - 3.0 * U[0]
    else:
        lap[0] = U[1] - 2.0 * U[0] + state.U[i0 - 1]
    lap[-1] = U[-2] - 2.0 * U[-1]

    # Unew = U + (U - Up) * rho + coef * c2 * lap, written into Up
    np.subtract(U, Up, out=tmp)
    tmp *= rho
    np.multiply(c2, lap, out=lap)
    lap *= coef
    np.add(U, tmp, out=Up)
    Up += lap

    state.U, state.U_prev = state.U_prev, state.U
    state.t += dt
    state.dt_prev = dt
    state.dt = dt
    state.n_steps += 1
    state.c_hi_seen = max(state.c_hi_seen, cmax)
    state._front += cmax * dt
    return None


@dataclass
class RiemannFields:
    """Derivative combinations of U on the grid at one time level."""

    r: np.ndarray
    u: np.ndarray
    dtu: np.ndarray
    dru: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    L1u: np.ndarray
    L2u: np.ndarray
    c: np.ndarray
    dtrU: np.ndarray
    drrU: np.ndarray


def riemann_quantities(state: WaveState, n: int | None = None, i0: int | None = None) -> RiemannFields:
    """Null-derivative fields from the last two levels (centered in r).

    By construction d_tr U = (w1 + w2)/2 and d_r^2 U = (w2 - w1)/(2c)
    identically; the identity is a definition here, not a check.  In window
    mode the fields start at the first evolving node.
    """
    if n is None:
        n = state.n_active
    n = min(n, state.U.size)
    if i0 is None:
        i0 = state.i_low
    U = state.U[i0:n]
    Up = state.U_prev[i0:n]
    r = state.r[i0:n]
    dr = state.dr
    dtU = (U - Up) / state.dt_prev

    def d_dr(F):
        out = np.empty_like(F)
        out[1:-1] = (F[2:] - F[:-2]) / (2.0 * dr)
        if i0 == 0:
            out[0] = (F[1] + F[0]) / (2.0 * dr)       # odd ghost: F_{-1} = -F_0
        else:
            out[0] = (F[1] - F[0]) / dr
        out[-1] = (0.0 - F[-2]) / (2.0 * dr)          # vacuum above
        return out

    drU = d_dr(U)
    dtrU = d_dr(dtU)
    drrU = np.empty_like(U)
    drrU[1:-1] = (U[2:] - 2.0 * U[1:-1] + U[:-2]) / dr**2
    if i0 == 0:
        drrU[0] = (U[1] - 3.0 * U[0]) / dr**2
    else:
        drrU[0] = 0.0
    drrU[-1] = (U[-2] - 2.0 * U[-1]) / dr**2

    u = U / r
    dtu = dtU / r
    dru = (drU - u) / r
    if state.frozen_c2 is not None:
        c2 = np.full(n, state.frozen_c2)
    else:
        c2 = 1.0 + u + dtu
    c = np.sqrt(np.clip(c2, 1e-12, None))
    w1 = dtrU - c * drrU
    w2 = dtrU + c * drrU
    L1u = dtu + c * dru
    L2u = dtu - c * dru
    return RiemannFields(r=r, u=u, dtu=dtu, dru=dru, w1=w1, w2=w2, L1u=L1u, L2u=L2u,
                         c=c, dtrU=dtrU, drrU=drrU)


@dataclass(frozen=True)
class MonitorRecord:
    """Running suprema of the strip quantities at one diagnostic time."""

    t: float
    A: float     # sup of int_D |w1| dr
    B: float     # sup of s |d_s u|
    C: float     # sup of s^{3/2} |w2|
    D: float     # sup of s^{3/2} |L1 u|


@dataclass(frozen=True)
class BlowupReport:
    epsilon: float
    thresholds: tuple
    crossing_times: dict
    t_star: float | None
    cause: str                   # 'threshold' | 'hyperbolicity-loss' | 'horizon' | 'NaN'
    t_end: float
    dr: float

    def crossed(self) -> list:
        return [lam for lam in self.thresholds if self.crossing_times.get(lam) is not None]


@dataclass
class RunResult:
    report: BlowupReport
    series: dict                 # t, max_abs_w1, max_abs_w2, min_c2, A, B, C, D arrays
    paths: dict                  # name -> dict of arrays along the tracked curve
    snapshots: list              # (t, r, U, dtU) tuples at requested times
    rho0: float | None
    tau0_ref: float | None

    def monitor_records(self) -> list:
        s = self.series
        return [MonitorRecord(t=float(s["t"][i]), A=float(s["A"][i]), B=float(s["B"][i]),
                              C=float(s["C"][i]), D=float(s["D"][i]))
                for i in range(len(s["t"]))]


class _PathTracker:
    """Forward integration of dr/dt = +c through the evolving field.

    Plus-characteristics labelled by lambda start at (r=lambda, t=0); labels
    left of the axis enter through r = dr at t = dr - lambda.
    """

    def __init__(self, lam: float, dr: float):
        self.lam = lam
        if lam >= dr:
            self.t0 = 0.0
            self.r = lam
        else:
            self.t0 = dr - lam
            self.r = dr
        self.active = self.t0 == 0.0

    def advance(self, state: WaveState, dt: float, t_before: float):
        if not self.active:
            if t_before + dt >= self.t0:
                self.active = True
            return
        c2 = state.c2
        n = state.n_active
        dr = state.dr

        def c_at(r):
            x = min(max(r / dr - 0.5, 0.0), n - 1.001)
            i = int(x)
            f = x - i
            c2_here = (1.0 - f) * c2[i] + f * c2[min(i + 1, n - 1)]
            return np.sqrt(max(c2_here, 1e-12))

        k1 = c_at(self.r)
        k2 = c_at(self.r + dt * k1)
        self.r += 0.5 * dt * (k1 + k2)


def _interp_at(r_query: float, r0: float, dr: float, F: np.ndarray) -> float:
    x = np.clip((r_query - r0) / dr, 0.0, F.size - 1.001)
    i = int(x)
    f = x - i
    return float((1.0 - f) * F[i] + f * F[min(i + 1, F.size - 1)])


def run_to_blowup(u0: RadialProfile, u1: RadialProfile, epsilon: float, dr: float, *,
                  t_max: float, thresholds=(50.0, 200.0, 800.0), rho0: float | None = None,
                  cfl: float = 0.8, c2_floor: float = 0.25, diag_stride_t: float = 0.02,
                  record_monitors: bool = True, snapshot_times=(), frozen_c: float | None = None,
                  r_alloc_t: float | None = None, window_q: float | None = None) -> RunResult:
    """Integrate until max|w1| crosses every threshold or a terminator fires.

    The grid is allocated for r_alloc_t (default min(t_max, modest multiple
    of the expected scale)) and grows on demand, so memory follows the
    realized run length, not the failsafe horizon.  window_q freezes the
    quiet tail left of r = t - window_q (a documented cost extension; the
    full domain stays active when None).
    """
    thresholds = tuple(sorted(float(x) for x in thresholds))
    if not thresholds or any(x <= 0 for x in thresholds):
        raise InputError("thresholds must be positive and nonempty")
    eps = float(epsilon)
    alloc_t = min(t_max, r_alloc_t if r_alloc_t is not None else max(50.0, 0.05 * t_max))
    R0 = 1.25 * alloc_t + u0.M + 8 * dr
    state = init_state(u0, u1, eps, dr, R0, cfl=cfl, c2_floor=c2_floor, frozen_c=frozen_c)
    if window_q is not None:
        if window_q < 3.0 * u0.M + 2.0 / (3.0 * max(eps, 1e-9)):
            raise InputError("window_q too narrow: it must cover the profile support "
                             "and the tail cutoff scale 2/(3 eps)")
        state.window_q = float(window_q)

    track = {}
    if record_monitors and rho0 is not None:
        track["inner"] = _PathTracker(rho0 - 1.0, dr)
        track["rho0"] = _PathTracker(rho0, dr)
        track["outer"] = _PathTracker(u0.M, dr)

    series = {k: [] for k in ("t", "max_abs_w1", "max_abs_w2", "min_c2", "A", "B", "C", "D")}
    paths = {name: {k: [] for k in ("t", "r", "w1", "w2", "dtu", "L2u", "c", "u")} for name in track}
    snapshots = []
    snap_left = sorted(float(x) for x in snapshot_times)

    crossing = {lam: None for lam in thresholds}
    sup_A = sup_B = sup_C = sup_D = 0.0
    prev_w1max = 0.0
    prev_t_diag = 0.0
    cause = "horizon"
    diag_every = max(1, int(round(diag_stride_t / state.dt)))

    def diagnostics():
        nonlocal sup_A, sup_B, sup_C, sup_D, prev_w1max, prev_t_diag
        fields = riemann_quantities(state)
        # in window mode skip a margin next to the frozen edge (stencil seam)
        j0 = min(int(1.0 / dr), fields.w1.size - 2) if state.i_low > 0 else 0
        w1max = float(np.max(np.abs(fields.w1[j0:])))
        w2max = float(np.max(np.abs(fields.w2[j0:])))
        if np.isnan(w1max):
            return "NaN", w1max
        t = state.t
        for lam in thresholds:
            if crossing[lam] is None and w1max >= lam:
                if prev_w1max < lam and w1max > prev_w1max and prev_t_diag > 0.0:
                    f = (lam - prev_w1max) / (w1max - prev_w1max)
                    crossing[lam] = prev_t_diag + f * (t - prev_t_diag)
                else:
                    crossing[lam] = t
        # strip monitors between the tracked plus-characteristics
        if track and eps > 0 and t >= 1.0 / eps and track["inner"].active:
            i0 = np.searchsorted(fields.r, track["inner"].r)
            i1 = np.searchsorted(fields.r, track["outer"].r) + 1
            if i1 - i0 >= 2:
                sl = slice(i0, i1)
                sup_A = max(sup_A, float(np.trapezoid(np.abs(fields.w1[sl]), fields.r[sl])))
                sup_B = max(sup_B, t * float(np.max(np.abs(fields.dtu[sl]))))
                sup_C = max(sup_C, t**1.5 * float(np.max(np.abs(fields.w2[sl]))))
                sup_D = max(sup_D, t**1.5 * float(np.max(np.abs(fields.L1u[sl]))))
        for name, tr in track.items():
            if not tr.active:
                continue
            rec = paths[name]
            rec["t"].append(t)
            rec["r"].append(tr.r)
            for key, arr in (("w1", fields.w1), ("w2", fields.w2), ("dtu", fields.dtu),
                             ("L2u", fields.L2u), ("c", fields.c), ("u", fields.u)):
                rec[key].append(_interp_at(tr.r, fields.r[0], dr, arr))
        series["t"].append(t)
        series["max_abs_w1"].append(w1max)
        series["max_abs_w2"].append(w2max)
        series["min_c2"].append(state.min_c2_last)
        series["A"].append(sup_A)
        series["B"].append(sup_B)
        series["C"].append(sup_C)
        series["D"].append(sup_D)
        prev_w1max = w1max
        prev_t_diag = t
        return None, w1max

    # initial diagnostic at t=0 records the data line
    diagnostics()
    while state.t < t_max:
        t_before = state.t
        kern_cause = _step_kernel(state)
        for tr in track.values():
            tr.advance(state, state.dt_prev, t_before)
        if kern_cause is not None:
            cause = kern_cause
            break
        while snap_left and state.t >= snap_left[0]:
            snap_left.pop(0)
            # full allocation, so post-hoc path tracing can cross vacuum too
            snapshots.append((state.t, state.r.copy(), state.U.copy(),
                              (state.U - state.U_prev) / state.dt_prev))
        if state.n_steps % diag_every == 0:
            diag_cause, w1max = diagnostics()
            if diag_cause is not None:
                cause = diag_cause
                break
            if all(crossing[lam] is not None for lam in thresholds):
                cause = "threshold"
                break

    crossed = [lam for lam in thresholds if crossing[lam] is not None]
    t_star = None
    if len(crossed) >= 2:
        l1, l2 = crossed[-2], crossed[-1]
        t1, t2 = crossing[l1], crossing[l2]
        slope_c = (t2 - t1) / (1.0 / l1 - 1.0 / l2)
        t_star = t2 + slope_c / l2
    elif cause in ("hyperbolicity-loss", "NaN"):
        t_star = state.t
    report = BlowupReport(epsilon=eps, thresholds=thresholds, crossing_times=dict(crossing),
                          t_star=t_star, cause=cause, t_end=state.t, dr=dr)
    series_np = {k: np.asarray(v) for k, v in series.items()}
    paths_np = {name: {k: np.asarray(v) for k, v in rec.items()} for name, rec in paths.items()}
    return RunResult(report=report, series=series_np, paths=paths_np, snapshots=snapshots,
                     rho0=rho0, tau0_ref=None)


def track_characteristic(snapshots, lam: float, sign: int, dr: float, frozen_c2=None):
    """Trace a characteristic dr/dt = sign*c through stored snapshots.

    snapshots: list of (t, r, U, dtU) with a stride small enough for RK2;
    the sound speed is rebuilt from (U, dtU) and interpolated linearly in
    (t, r).  Returns dict of samples (t, r, w1, w2, u, dtu, L2u, c) at the
    snapshot times.
    """
    if len(snapshots) < 2:
        raise InputError("need at least two snapshots to trace a path")
    if sign not in (+1, -1):
        raise InputError("sign must be +1 or -1")

    def fields_of(snap):
        t, r, U, dtU = snap
        n = U.size
        u = U / r
        dtu = dtU / r
        c2 = np.full(n, frozen_c2) if frozen_c2 is not None else 1.0 + u + dtu
        c = np.sqrt(np.clip(c2, 1e-12, None))
        drU = np.empty_like(U)
        drU[1:-1] = (U[2:] - U[:-2]) / (2 * dr)
        drU[0] = (U[1] + U[0]) / (2 * dr)
        drU[-1] = -U[-2] / (2 * dr)
        dtrU = np.empty_like(U)
        dtrU[1:-1] = (dtU[2:] - dtU[:-2]) / (2 * dr)
        dtrU[0] = (dtU[1] + dtU[0]) / (2 * dr)
        dtrU[-1] = -dtU[-2] / (2 * dr)
        drrU = np.empty_like(U)
        drrU[1:-1] = (U[2:] - 2 * U[1:-1] + U[:-2]) / dr**2
        drrU[0] = (U[1] - 3 * U[0]) / dr**2
        drrU[-1] = (U[-2] - 2 * U[-1]) / dr**2
        dru = (drU - u) / r
        return {
            "c": c, "u": u, "dtu": dtu,
            "w1": dtrU - c * drrU, "w2": dtrU + c * drrU,
            "L2u": dtu - c * dru, "r": r,
        }

    cache = [fields_of(s) for s in snapshots]
    times = [s[0] for s in snapshots]

    def interp(fields, r_query, key):
        arr = fields[key]
        x = np.clip(r_query / dr - 0.5, 0.0, arr.size - 1.001)
        i = int(x)
        f = x - i
        return (1 - f) * arr[i] + f * arr[min(i + 1, arr.size - 1)]

    i_first = 0
    r_path = float(lam)
    if r_path < dr:
        if sign < 0:
            raise InputError("minus paths must start inside the stored domain (lambda >= dr)")
        # plus-characteristics with labels left of the axis enter through
        # r = dr at t = dr - lambda (unit-speed placement; error O(eps))
        t_enter = dr - lam
        i_first = int(np.searchsorted(times, t_enter))
        if i_first >= len(times):
            raise RunFailure(f"snapshots end before the path enters at t={t_enter}")
        r_path = max(dr, lam + times[i_first])
    out = {k: [] for k in ("t", "r", "w1", "w2", "u", "dtu", "L2u", "c")}

    def record(i, r_now):
        out["t"].append(times[i])
        out["r"].append(r_now)
        for key in ("w1", "w2", "u", "dtu", "L2u", "c"):
            out[key].append(interp(cache[i], r_now, key))

    record(i_first, r_path)
    for i in range(i_first, len(times) - 1):
        h = times[i + 1] - times[i]
        c_now = interp(cache[i], r_path, "c")
        r_mid = r_path + sign * 0.5 * h * c_now
        c_mid = 0.5 * (interp(cache[i], r_mid, "c") + interp(cache[i + 1], r_mid, "c"))
        r_path = r_path + sign * h * c_mid
        if r_path < dr or r_path > cache[i + 1]["r"][-1]:
            raise RunFailure(f"characteristic left the stored domain at t={times[i+1]}")
        record(i + 1, r_path)
    return {k: np.asarray(v) for k, v in out.items()}
