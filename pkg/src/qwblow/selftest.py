"""Fast invariant suite behind the `selftest` CLI verb.

Four suites cover the load-bearing identities: fold/minimum equivalence,
profile-equation residual order, linear-limit solver convergence, and the
Riccati certificate soundness batch.  The QWBLOW_SELFTEST_FAULT environment
hook (value 'tau0_bias') injects a 1% bias into the first suite so the
harness itself can be shown to fail loudly.
"""

from __future__ import annotations

import os
import time

import numpy as np

from .approx import linear_wave
from .characteristics import fold_time, pde_residual
from .data import make_profile, zero_profile
from .lifespan import tau0
from .radiation import radiation_field
from .riccati import RiccatiInstance, riccati_bound, riccati_integrate
from .wave import init_state, _step_kernel

__all__ = ["run_selftest"]


def _field_data1():
    u0 = make_profile("poly_bump", M=1.0, k=4, amplitude=1.0)
    u1 = zero_profile(1.0)
    return u0, u1, radiation_field(u0, u1)


def _suite_fold_equivalence():
    _, _, f = _field_data1()
    est = tau0(f, grid_n=20001)
    ref = est.tau0
    if os.environ.get("QWBLOW_SELFTEST_FAULT") == "tau0_bias":
        ref *= 1.01
    s = np.linspace(-1 + 1e-4, 1 - 1e-4, 4001)
    folds = fold_time(f, s, tau_cap=10.0 * ref)
    rel = abs(float(np.min(folds)) - ref) / ref
    return rel < 1e-5, f"min fold vs tau0 rel err {rel:.2e} (tol 1e-5)"


def _suite_residual_order():
    _, _, f = _field_data1()
    est = tau0(f, grid_n=5001)
    q = np.linspace(-1.5, 0.98, 160)
    tau_c = 0.4 * est.tau0
    r1 = pde_residual(f, tau_c, q, 1e-3, fan_n=1501)
    r2 = pde_residual(f, tau_c, q, 5e-4, fan_n=1501)
    order = np.log2(r1 / r2)
    return order >= 1.8, f"residual order {order:.3f} (need >= 1.8)"


def _suite_linear_convergence():
    u0 = make_profile("poly_bump", M=1.0, k=4, amplitude=1.0)
    u1 = make_profile("poly_bump", M=1.0, k=3, amplitude=0.5)
    errs = []
    for dr in (0.02, 0.01):
        st = init_state(u0, u1, 1.0, dr, R_max=5.0, frozen_c=1.0)
        while st.t < 1.5:
            _step_kernel(st)
        n = st.n_active
        exact = st.r[:n] * linear_wave(u0, u1, st.t, st.r[:n]).w0
        errs.append(float(np.max(np.abs(st.U[:n] - exact))))
    order = np.log2(errs[0] / errs[1])
    return order >= 1.85, f"linear L-inf order {order:.3f} (need >= 1.85)"


def _suite_riccati_batch():
    rng = np.random.default_rng(7)
    certified = unsound = 0
    for _ in range(120):
        T = float(rng.uniform(0.5, 3.0))
        c0 = rng.uniform(0.0, 2.0, 2)
        c1 = rng.uniform(-1.0, 1.0, 2)
        c2 = rng.uniform(-1.0, 1.0, 2)
        inst = RiccatiInstance(
            T=T, w0=float(rng.uniform(-1.0, 5.0)),
            a0=lambda t, c=c0: c[0] + c[1] * np.square(np.asarray(t, float) / T),
            a1=lambda t, c=c1: c[0] + c[1] * np.sin(np.asarray(t, float)),
            a2=lambda t, c=c2: c[0] + c[1] * np.cos(np.asarray(t, float)),
        )
        rep = riccati_bound(inst, quad_tol=1e-8)
        if rep.certified:
            certified += 1
            t_blow, _ = riccati_integrate(inst)
            if t_blow is None or t_blow >= T:
                unsound += 1
    return unsound == 0 and certified > 0, f"{certified} certified, {unsound} unsound"


SUITES = (
    ("fold-tau0-equivalence", _suite_fold_equivalence),
    ("profile-residual-order", _suite_residual_order),
    ("linear-solver-convergence", _suite_linear_convergence),
    ("riccati-soundness-batch", _suite_riccati_batch),
)


def run_selftest(stream=None) -> bool:
    import sys
    stream = stream or sys.stdout
    all_ok = True
    stream.write(f"{'suite':32s} {'status':8s} {'secs':>7s}  detail\n")
    for name, fn in SUITES:
        t0 = time.time()
        try:
            ok, detail = fn()
        except Exception as exc:          # a crashed suite is a failed suite
            ok, detail = False, f"exception: {exc}"
        el = time.time() - t0
        all_ok &= ok
        stream.write(f"{name:32s} {'pass' if ok else 'FAIL':8s} {el:7.2f}  {detail}\n")
    stream.write(f"selftest: {'all suites passed' if all_ok else 'FAILURES present'}\n")
    return all_ok
