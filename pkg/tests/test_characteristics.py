import numpy as np
import pytest

from qwblow.characteristics import (
    characteristic_fan,
    dq_ds,
    fold_time,
    invert_s,
    pde_residual,
)
from qwblow.data import make_profile, zero_profile
from qwblow.errors import FoldError, InputError
from qwblow.lifespan import tau0, tau_unified
from qwblow.radiation import radiation_field

from _oracles import upwind_profile

TAU0_DATA1 = 0.93442345259691441


@pytest.fixture(scope="module")
def field():
    u0 = make_profile("poly_bump", M=1.0, k=4, amplitude=1.0)
    return radiation_field(u0, zero_profile(1.0))


def test_dq_ds_initial_value(field):
    s = np.linspace(-2.5, 1.0, 101)
    assert np.allclose(dq_ds(field, 0.0, s), 1.0, atol=1e-15)


def test_dq_ds_b_branch_fold_identity(field):
    # at s = -1/3, F' = 0 and the fold is exactly 2/F''
    assert dq_ds(field, 486.0 / 512.0, -1.0 / 3.0) == pytest.approx(0.0, abs=1e-12)


def test_dq_ds_matches_finite_difference_of_q(field):
    fan = characteristic_fan(field, 1.0, n=4001)
    h = 1e-6
    for s in (-0.5, -0.31, 0.2, 0.8):
        fd = (fan.q_of_s(s + h) - fan.q_of_s(s - h)) / (2 * h)
        assert fd == pytest.approx(dq_ds(field, 1.0, s), abs=1e-8)


def test_fan_initial_time_is_identity(field):
    fan = characteristic_fan(field, 0.0, n=1001)
    assert np.max(np.abs(fan.q - fan.s)) < 1e-12
    F = np.array([field.F(x) for x in fan.s])
    assert np.max(np.abs(fan.V - F)) < 1e-12


def test_fan_boundary_node(field):
    for tau in (0.0, 0.3, 0.8):
        fan = characteristic_fan(field, tau, n=801)
        assert fan.q[-1] == 1.0
        assert fan.V[-1] == 0.0
        assert fan.w[-1] == 0.0


def test_fan_w_equals_dF_exactly(field):
    fan = characteristic_fan(field, 0.6, n=801)
    assert np.array_equal(fan.w, field.dF(fan.s))


def test_fan_d2v_dsq_identity(field):
    fan = characteristic_fan(field, 0.5, n=1201)
    assert np.max(np.abs(fan.d2V * fan.dsq - field.d2F(fan.s))) < 1e-12


def test_fan_monotone_below_fold_and_folded_above(field):
    assert characteristic_fan(field, 0.99 * TAU0_DATA1, n=2001).monotone
    assert not characteristic_fan(field, 1.01 * TAU0_DATA1, n=2001).monotone


def test_invert_round_trip(field):
    fan = characteristic_fan(field, 0.5, n=2001)
    rng = np.random.default_rng(3)
    s = rng.uniform(-0.98, 0.98, 100)
    q = fan.q_of_s(s)
    back = invert_s(fan, q)
    assert np.max(np.abs(back - s)) < 1e-9


def test_invert_boundary_and_identity_cases(field):
    fan0 = characteristic_fan(field, 0.0, n=1001)
    assert invert_s(fan0, 0.3) == pytest.approx(0.3, abs=1e-12)
    fan = characteristic_fan(field, 0.4, n=1001)
    assert invert_s(fan, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_invert_rejects_folded_fan(field):
    fan = characteristic_fan(field, 1.01 * TAU0_DATA1, n=1001)
    with pytest.raises(FoldError):
        invert_s(fan, 0.0)


def test_invert_rejects_out_of_range(field):
    fan = characteristic_fan(field, 0.2, n=1001)
    with pytest.raises(InputError):
        invert_s(fan, 1.5)


def test_fold_time_closed_form_points(field):
    assert fold_time(field, -1.0 / 3.0) == pytest.approx(486.0 / 512.0, abs=1e-9)
    assert fold_time(field, 1.0 / 3.0) == np.inf


def test_fold_equals_tau_unified_where_defined(field):
    s = np.linspace(-0.999, 0.999, 4001)
    cap = 10.0 * TAU0_DATA1
    folds = fold_time(field, s, tau_cap=cap)
    taus = tau_unified(field, s)
    mask = np.isfinite(taus) & (taus < 0.5 * cap)
    assert np.max(np.abs(folds[mask] - taus[mask])) < 1e-9
    # inadmissible points never fold
    assert np.all(np.isinf(folds[np.isnan(taus)]))


def test_fold_minimum_matches_tau0(field):
    s = np.linspace(-1 + 1e-4, 1 - 1e-4, 10000)
    folds = fold_time(field, s, tau_cap=5.0)
    est = tau0(field, grid_n=20001)
    assert np.min(folds) == pytest.approx(est.tau0, rel=1e-6)


def test_flat_tail_evaluation(field):
    # q far left of the data support sits on the constant tail
    fan = characteristic_fan(field, 0.5, n=2001)
    out = fan.eval(np.array([-2.9, -2.5]))
    assert out["dqV"][0] == 0.0 and out["d2qV"][0] == 0.0
    assert out["V"][0] == pytest.approx(out["V"][1], abs=1e-12)
    # the tail constant equals V on any node with label s <= -M
    assert out["V"][0] == pytest.approx(fan.V[0], abs=1e-10)
    # continuity across the tail boundary q(tau, -M)
    q_edge = fan.q_of_s(-1.0)
    assert fan.eval(q_edge - 1e-9)["V"] == pytest.approx(fan.eval(q_edge + 1e-9)["V"], abs=1e-7)


def test_vacuum_above_support(field):
    fan = characteristic_fan(field, 0.3, n=1001)
    out = fan.eval(np.array([1.0 + 1e-12, 2.0, 10.0]))
    for key in ("V", "dqV", "d2qV", "dtauV", "dqtauV"):
        assert np.all(out[key] == 0.0)


def test_dtauv_matches_finite_difference(field):
    h = 1e-5
    q_pts = np.array([-1.2, -0.6, -0.2, 0.3, 0.9])
    fan_m = characteristic_fan(field, 0.5 - h, n=3001)
    fan_p = characteristic_fan(field, 0.5 + h, n=3001)
    fan_0 = characteristic_fan(field, 0.5, n=3001)
    fd = (fan_p.eval(q_pts)["V"] - fan_m.eval(q_pts)["V"]) / (2 * h)
    an = fan_0.eval(q_pts)["dtauV"]
    assert np.max(np.abs(fd - an)) < 1e-8


def test_pde_residual_refinement_order(field):
    q = np.linspace(-1.4, 0.98, 160)
    tau_c = 0.4 * TAU0_DATA1
    r1 = pde_residual(field, tau_c, q, 1e-3, fan_n=2001)
    r2 = pde_residual(field, tau_c, q, 5e-4, fan_n=2001)
    assert np.log2(r1 / r2) >= 1.8


def test_pde_residual_zero_field():
    f0 = radiation_field(zero_profile(1.0), zero_profile(1.0))
    q = np.linspace(-1.0, 0.9, 50)
    assert pde_residual(f0, 0.3, q, 1e-3, fan_n=301) == 0.0


def test_pde_residual_vacuum_region(field):
    q = np.linspace(1.05, 3.0, 40)
    assert pde_residual(field, 0.3, q, 1e-3, fan_n=1001) == 0.0


def test_fan_agrees_with_upwind_integrator(field):
    # independent first-order oracle for the reduced transport equation
    tau_c = 0.5
    errs = []
    for n_q in (701, 1401):
        q, V_oracle, w_oracle = upwind_profile(field, tau_c, n_q=n_q)
        fan = characteristic_fan(field, tau_c, n=4001)
        out = fan.eval(q)
        errs.append(np.max(np.abs(out["V"] - V_oracle)))
    order = np.log2(errs[0] / errs[1])
    assert errs[1] < 0.01
    assert order > 0.75


def test_fan_rejects_bad_arguments(field):
    with pytest.raises(InputError):
        characteristic_fan(field, -0.1)
    with pytest.raises(InputError):
        characteristic_fan(field, 0.1, n=1)
    with pytest.raises(InputError):
        characteristic_fan(field, 0.1, s_min=2.0)
