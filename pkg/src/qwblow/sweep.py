"""Parameter sweep over the amplitude epsilon, assembling the lifespan table.

One blowup run per epsilon (optionally in parallel processes); rows are
merged deterministically in descending epsilon.  The budget guard predicts
node-steps from the expected blowup scale exp(tau0/eps) with a max-c bound
of 1.5 and refuses over-budget sweeps up front.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .errors import InputError
from .lifespan import tau0 as tau0_estimate
from .radiation import radiation_field
from .wave import run_to_blowup

__all__ = ["SweepRow", "SweepResult", "sweep", "predict_node_steps", "write_sweep_csv", "SWEEP_HEADER"]

SWEEP_HEADER = "epsilon,T_num,eps_ln_T,tau0_ref,dr,cause"


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    T_num: float | None
    eps_ln_T: float | None
    tau0_ref: float
    dr: float
    cause: str


@dataclass
class SweepResult:
    rows: list
    tau0_ref: float
    s_star: float
    metadata: dict
    runs: dict    # epsilon -> RunResult (in-memory reuse by the certificate)

    def trend(self):
        """|eps ln T - tau0| per finite row and the count of monotonicity violations."""
        d = [(r.epsilon, abs(r.eps_ln_T - self.tau0_ref)) for r in self.rows
             if r.eps_ln_T is not None]
        viol = sum(1 for a, b in zip(d[:-1], d[1:]) if b[1] > a[1] + 1e-12)
        return d, viol


def predict_node_steps(epsilon: float, tau0_ref: float, dr: float, cfl: float,
                       M: float, window_q: float | None) -> float:
    """Safe-side cost estimate for one run (max c bounded by 1.5)."""
    c_bound = 1.5
    T_pred = 3.0 * float(np.exp(tau0_ref / epsilon))
    steps = T_pred * c_bound / (cfl * dr)
    if window_q is None:
        nodes = (c_bound * T_pred + M + 1.0) / dr
    else:
        nodes = (window_q + M + 2.0) / dr
    return steps * nodes


def _run_one(args):
    (u0, u1, eps, dr, t_max, thresholds, rho0, cfl, c2_floor, diag_stride, window_q,
     snapshot_times) = args
    return run_to_blowup(u0, u1, eps, dr, t_max=t_max, thresholds=thresholds, rho0=rho0,
                         cfl=cfl, c2_floor=c2_floor, diag_stride_t=diag_stride,
                         window_q=window_q, snapshot_times=snapshot_times)


def sweep(cfg: RunConfig, jobs: int | None = None) -> SweepResult:
    u0, u1 = cfg.profiles()
    field = radiation_field(u0, u1)
    est = tau0_estimate(field, grid_n=20001)
    tau0_ref = est.tau0
    dr = cfg.get_float("solver", "dr")
    cfl = cfg.get_float("solver", "cfl")
    eps_list = sorted(cfg.epsilons, reverse=True)
    if not eps_list:
        return SweepResult(rows=[], tau0_ref=tau0_ref, s_star=est.s_star,
                           metadata=_metadata(cfg, tau0_ref), runs={})
    if any(e <= 0 for e in eps_list):
        raise InputError("sweep epsilons must be positive")

    budget = cfg.get_float("sweep", "budget")
    cost = sum(predict_node_steps(e, tau0_ref, dr, cfl, field.M, cfg.window_q(e))
               for e in eps_list)
    if cost > budget:
        raise InputError(
            f"sweep refused by budget guard: predicted {cost:.3g} node-steps "
            f"exceeds budget {budget:.3g}; raise sweep.budget or shrink the run"
        )

    tasks = []
    for eps in eps_list:
        tasks.append((u0, u1, eps, dr, cfg.tmax(eps, tau0_ref), cfg.thresholds, est.s_star,
                      cfl, cfg.get_float("solver", "c2_floor"),
                      cfg.get_float("solver", "diag_stride"), cfg.window_q(eps), ()))

    if jobs is None:
        jobs = cfg.get_int("sweep", "jobs")
    if jobs <= 0:
        jobs = min(len(eps_list), os.cpu_count() or 1)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]

    rows = []
    runs = {}
    for eps, res in zip(eps_list, results):
        rep = res.report
        runs[eps] = res
        if rep.t_star is None:
            rows.append(SweepRow(eps, None, None, tau0_ref, dr, rep.cause))
        else:
            rows.append(SweepRow(eps, rep.t_star, eps * float(np.log(rep.t_star)),
                                 tau0_ref, dr, rep.cause))
    return SweepResult(rows=rows, tau0_ref=tau0_ref, s_star=est.s_star,
                       metadata=_metadata(cfg, tau0_ref), runs=runs)


def _metadata(cfg: RunConfig, tau0_ref: float) -> dict:
    from . import __version__
    return {
        "data": dict(cfg.raw["data"]),
        "cfl": cfg.get_float("solver", "cfl"),
        "thresholds": cfg.thresholds,
        "tau0_ref": tau0_ref,
        "version": __version__,
    }


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def render_sweep_csv(result: SweepResult) -> str:
    lines = [SWEEP_HEADER]
    for r in result.rows:
        lines.append(",".join([
            _fmt(r.epsilon), _fmt(r.T_num), _fmt(r.eps_ln_T),
            _fmt(r.tau0_ref), _fmt(r.dr), r.cause,
        ]))
    return "\n".join(lines) + "\n"


def write_sweep_csv(result: SweepResult, path: str):
    with open(path, "w", newline="") as fh:
        fh.write(render_sweep_csv(result))
