import numpy as np
import pytest

from qwblow.approx import (
    ApproxSolution,
    cutoff_chi,
    ja_scaling_probe,
    linear_wave,
    residual_ja,
    u_approx,
)
from qwblow.data import make_profile, zero_profile
from qwblow.errors import InputError
from qwblow.radiation import radiation_field

from _oracles import loglog_slope

TAU0_DATA1 = 0.93442345259691441


def data1(amplitude=1.0):
    return make_profile("poly_bump", M=1.0, k=4, amplitude=amplitude), zero_profile(1.0)


def mixed_data():
    return (make_profile("poly_bump", M=1.0, k=4, amplitude=1.0),
            make_profile("poly_bump", M=1.0, k=3, amplitude=0.7))


# cutoff ---------------------------------------------------------------------

def test_chi_plateaus():
    assert cutoff_chi(0.5) == (1.0, 0.0, 0.0)
    assert cutoff_chi(1.0) == (1.0, 0.0, 0.0)
    assert cutoff_chi(3.0) == (0.0, 0.0, 0.0)
    assert cutoff_chi(2.0) == (0.0, 0.0, 0.0)


def test_chi_midpoint_symmetry():
    assert cutoff_chi(1.5).value == pytest.approx(0.5, abs=1e-15)
    x = np.linspace(1.01, 1.99, 99)
    v = cutoff_chi(x).value
    assert np.max(np.abs(v + cutoff_chi(3.0 - x).value - 1.0)) < 1e-14


def test_chi_derivatives_by_fd():
    x = np.linspace(1.05, 1.95, 91)
    h = 1e-6
    d1_fd = (cutoff_chi(x + h).value - cutoff_chi(x - h).value) / (2 * h)
    d2_fd = (cutoff_chi(x + h).d1 - cutoff_chi(x - h).d1) / (2 * h)
    assert np.max(np.abs(cutoff_chi(x).d1 - d1_fd)) < 1e-7
    assert np.max(np.abs(cutoff_chi(x).d2 - d2_fd)) < 1e-6


def test_chi_monotone_decreasing():
    x = np.linspace(0.0, 2.5, 251)
    assert np.all(np.diff(cutoff_chi(x).value) <= 1e-15)


# linear wave ----------------------------------------------------------------

def test_linear_wave_initial_data():
    u0, u1 = mixed_data()
    for r in (0.2, 0.5, 0.9, 1.4):
        lw = linear_wave(u0, u1, 0.0, r)
        assert lw.w0 == pytest.approx(u0.value(r), abs=1e-13)
        assert lw.dt == pytest.approx(u1.value(r), abs=1e-13)


def test_strong_huygens_inside_cone():
    u0, u1 = mixed_data()
    for t, r in ((10.0, 3.0), (5.0, 0.5), (30.0, 20.0)):
        assert t - r > 1.0
        lw = linear_wave(u0, u1, t, r)
        assert lw.w0 == 0.0 and lw.dt == 0.0 and lw.dr == 0.0


def test_vacuum_outside_cone():
    u0, u1 = mixed_data()
    lw = linear_wave(u0, u1, 2.0, 5.0)   # r - t = 3 > M
    assert lw.w0 == 0.0


def test_radiation_field_is_exact_at_finite_time():
    # the radial 3-D wave attains its radiation field exactly once r+t > M:
    # r*w0(t, t+q) - F(q) vanishes to rounding, with no 1/t tail
    u0, u1 = mixed_data()
    f = radiation_field(u0, u1)
    for t in (25.0, 50.0, 100.0, 200.0):
        q = np.linspace(-1.0, 1.0, 81)
        rw = np.array([(t + x) * linear_wave(u0, u1, t, t + x).w0 for x in q])
        Fq = np.array([f.F(x) for x in q])
        assert np.max(np.abs(rw - Fq)) < 1e-12


def test_linear_wave_requires_positive_radius():
    u0, u1 = mixed_data()
    with pytest.raises(InputError):
        linear_wave(u0, u1, 1.0, 0.0)


# u_approx -------------------------------------------------------------------

def test_initial_line_matches_scaled_data():
    u0, u1 = mixed_data()
    apx = ApproxSolution(u0, u1, epsilon=0.25)
    for r in (0.3, 0.7, 1.2):
        ua = u_approx(apx, 0.0, r)
        assert ua.value == pytest.approx(0.25 * u0.value(r), abs=1e-13)
        assert ua.dt == pytest.approx(0.25 * u1.value(r), abs=1e-13)


def test_pure_linear_region():
    # for t <= 1/eps the approximation is exactly eps * w0
    u0, u1 = data1()
    eps = 0.25
    apx = ApproxSolution(u0, u1, epsilon=eps)
    t = 3.9
    assert eps * t <= 1.0
    r = np.linspace(2.5, 5.2, 7)
    ua = u_approx(apx, t, r)
    lw = linear_wave(u0, u1, t, r)
    assert np.max(np.abs(ua.value - eps * lw.w0)) < 1e-13
    assert np.max(np.abs(ua.dt - eps * lw.dt)) < 1e-13


def test_pure_profile_region_identity():
    # for t >= 2/eps and -1/(3 eps) < q < M: u_a * r / eps = V(q, tau)
    u0, u1 = data1()
    eps = 0.25
    apx = ApproxSolution(u0, u1, epsilon=eps)
    t = 9.0
    assert eps * t >= 2.0
    q = np.linspace(-1.0 / (3 * eps) + 0.1, 0.99, 23)
    r = t + q
    ua = u_approx(apx, t, r)
    fan = apx.fan(eps * np.log1p(t))
    V = fan.eval(q)["V"]
    assert np.max(np.abs(ua.value * r / eps - V)) < 1e-12


def test_vacuum_beyond_support():
    u0, u1 = data1()
    apx = ApproxSolution(u0, u1, epsilon=0.25)
    ua = u_approx(apx, 9.0, 9.0 + 1.5)     # q = 1.5 > M
    assert ua.value == 0.0 and ua.dt == 0.0


def test_derivatives_match_centered_differences():
    u0, u1 = mixed_data()
    apx = ApproxSolution(u0, u1, epsilon=0.2)
    rng = np.random.default_rng(11)
    h = 1e-5
    worst = 0.0
    for _ in range(100):
        t = float(rng.uniform(0.3, 25.0))
        r = float(rng.uniform(max(0.3, t - 2.5), t + 1.4))
        ua = u_approx(apx, t, r)
        fd_t = (u_approx(apx, t + h, r).value - u_approx(apx, t - h, r).value) / (2 * h)
        fd_r = (u_approx(apx, t, r + h).value - u_approx(apx, t, r - h).value) / (2 * h)
        fd_tt = (u_approx(apx, t + h, r).dt - u_approx(apx, t - h, r).dt) / (2 * h)
        fd_rr = (u_approx(apx, t, r + h).dr - u_approx(apx, t, r - h).dr) / (2 * h)
        fd_tr = (u_approx(apx, t, r + h).dt - u_approx(apx, t, r - h).dt) / (2 * h)
        scale = max(abs(ua.dt), abs(ua.dr), abs(ua.dtt), abs(ua.drr), 1e-3)
        worst = max(worst,
                    abs(fd_t - ua.dt) / scale, abs(fd_r - ua.dr) / scale,
                    abs(fd_tt - ua.dtt) / scale, abs(fd_rr - ua.drr) / scale,
                    abs(fd_tr - ua.dtr) / scale)
    assert worst < 1e-5


def test_c2_seams_one_sided_differences():
    # the blend is smooth across t = 1/eps and t = 2/eps
    u0, u1 = data1()
    eps = 0.25
    apx = ApproxSolution(u0, u1, epsilon=eps)
    r = 5.1
    for seam in (1.0 / eps, 2.0 / eps):
        for h in (1e-4, 5e-5):
            left = u_approx(apx, seam - h, r)
            right = u_approx(apx, seam + h, r)
            assert abs(right.value - left.value) < 10 * h
            assert abs(right.dt - left.dt) < 10 * h
            assert abs(right.dtt - left.dtt) < 10 * h


def test_u_approx_rejects_past_lifetime():
    u0, u1 = data1()
    apx = ApproxSolution(u0, u1, epsilon=0.3)
    t_bad = float(np.exp(1.05 * apx.tau0_ref / 0.3))
    with pytest.raises(InputError):
        u_approx(apx, t_bad, t_bad + 0.5)


# residual -------------------------------------------------------------------

def test_ja_zero_data():
    apx = ApproxSolution(zero_profile(1.0), zero_profile(1.0), epsilon=0.2)
    r = np.linspace(8.0, 14.0, 50)
    assert np.max(np.abs(residual_ja(apx, 12.0, r))) == 0.0


def test_ja_scaling_slope_and_epsilon_factor():
    u0, u1 = data1()
    eps = 0.2
    b = 0.8 * TAU0_DATA1
    apx = ApproxSolution(u0, u1, epsilon=eps)
    t_hi = float(np.exp(b / eps) - 1)
    t_list = np.geomspace(2 / eps, t_hi, 8)
    slope, sups = ja_scaling_probe(apx, t_list)
    assert -3.3 <= slope <= -1.7
    # halving eps on a window valid for both runs shrinks sup|J_a| by 4..8-ish
    apx_half = ApproxSolution(u0, u1, epsilon=eps / 2)
    t_common = np.geomspace(4 / eps, t_hi, 6)
    _, s_full = ja_scaling_probe(apx, t_common)
    _, s_half = ja_scaling_probe(apx_half, t_common)
    ratio = np.max(s_full) / np.max(s_half)
    assert 3.0 <= ratio <= 9.0


def test_ja_probe_requires_positive_epsilon():
    apx = ApproxSolution(*data1(), epsilon=0.0)
    with pytest.raises(InputError):
        ja_scaling_probe(apx, [10.0, 20.0])
