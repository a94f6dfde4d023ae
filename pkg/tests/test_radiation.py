import numpy as np
import pytest

from qwblow.data import make_profile, zero_profile
from qwblow.errors import InputError
from qwblow.radiation import adaptive_simpson, radiation_field, tail_integral


def data1():
    return (make_profile("poly_bump", M=1.0, k=4, amplitude=1.0), zero_profile(1.0))


def test_zero_data_gives_zero_field():
    f = radiation_field(zero_profile(1.0), zero_profile(1.0))
    s = np.linspace(-2, 2, 21)
    assert np.all(f.F(s) == 0.0)
    assert f.is_trivial


def test_data1_closed_form():
    # F(s) = s (1-s^2)^4 / 2 for DATA-1 (u1 = 0)
    f = radiation_field(*data1())
    assert f.F(0.5) == pytest.approx(0.0791015625, abs=1e-15)
    assert f.dF(0.0) == pytest.approx(0.5, abs=0)
    assert f.d2F(-1.0 / 3.0) == pytest.approx(512.0 / 243.0, rel=1e-14)


def test_data1_second_derivative_closed_form_and_fd():
    f = radiation_field(*data1())
    s = np.linspace(-0.95, 0.95, 101)
    ref = 12 * s * (3 * s**2 - 1) * (1 - s**2) ** 2
    assert np.max(np.abs(f.d2F(s) - ref)) < 1e-13
    h = 1e-5
    fd = (np.array([f.F(x + h) for x in s]) - 2 * np.array([f.F(x) for x in s])
          + np.array([f.F(x - h) for x in s])) / h**2
    assert np.max(np.abs(f.d2F(s) - fd)) < 1e-4


def test_field_vanishes_outside_support_exactly():
    u0 = make_profile("poly_bump", M=1.0, k=4, amplitude=1.0)
    u1 = make_profile("poly_bump", M=1.0, k=3, amplitude=0.8)
    f = radiation_field(u0, u1)
    for s in (1.0, -1.0, 1.7, -2.5, 10.0):
        assert f.F(s) == 0.0
        assert f.dF(s) == 0.0
        assert f.d2F(s) == 0.0


def test_quadrature_definition_consistency():
    # F agrees with direct Simpson integration of the defining formula
    u0 = make_profile("poly_bump", M=1.0, k=4, amplitude=0.3)
    u1 = make_profile("poly_bump", M=1.0, k=5, amplitude=-0.6)
    f = radiation_field(u0, u1)
    for s in (-0.8, -0.3, 0.0, 0.4, 0.9):
        tail = adaptive_simpson(lambda x: x * u1.value(x), s, 1.0, 1e-13)
        assert f.F(s) == pytest.approx(0.5 * (s * u0.value(s) + tail), abs=1e-12)


def test_derivative_consistency_centered_differences():
    u0 = make_profile("poly_bump", M=1.0, k=5, amplitude=0.4)
    u1 = make_profile("poly_bump", M=1.0, k=4, amplitude=0.7)
    f = radiation_field(u0, u1)
    s = np.linspace(-0.99, 0.99, 1001)
    # centered differences at two steps: error must drop at order ~2
    errs = []
    for h in (2e-4, 1e-4):
        Fp = np.array([f.F(x + h) for x in s])
        Fm = np.array([f.F(x - h) for x in s])
        errs.append(np.max(np.abs(f.dF(s) - (Fp - Fm) / (2 * h))))
    assert errs[0] < 1e-6
    assert np.log2(errs[0] / errs[1]) > 1.8


def test_oddness_for_u1_zero_data():
    f = radiation_field(*data1())
    s = np.linspace(-1, 1, 41)
    Fs = np.array([f.F(x) for x in s])
    Fm = np.array([f.F(-x) for x in s])
    assert np.max(np.abs(Fs + Fm)) < 1e-14


def test_u1_only_field_closed_form():
    # u1 = (1-s^2)^3: F(s) = (1-s^2)^4/16 inside the support
    u1 = make_profile("poly_bump", M=1.0, k=3, amplitude=1.0)
    f = radiation_field(zero_profile(1.0), u1)
    s = np.linspace(-0.99, 0.99, 57)
    ref = (1 - s**2) ** 4 / 16.0
    vals = np.array([f.F(x) for x in s])
    assert np.max(np.abs(vals - ref)) < 1e-12


def test_tail_integral_short_circuits():
    u1 = make_profile("poly_bump", M=1.0, k=3, amplitude=1.0)
    assert tail_integral(u1, 1.0) == 0.0
    assert tail_integral(u1, 2.0) == 0.0
    assert tail_integral(u1, -1.0) == 0.0
    assert tail_integral(u1, -3.0) == 0.0


def test_mismatched_supports_rejected():
    u0 = make_profile("poly_bump", M=1.0, k=4, amplitude=1.0)
    u1 = make_profile("poly_bump", M=2.0, k=4, amplitude=1.0)
    with pytest.raises(InputError):
        radiation_field(u0, u1)


def test_nontrivial_data_gives_nontrivial_field():
    for u0, u1 in [data1(),
                   (zero_profile(1.0), make_profile("poly_bump", M=1.0, k=3, amplitude=1.0)),
                   (make_profile("poly_bump", M=1.0, k=5, amplitude=1.0), zero_profile(1.0))]:
        f = radiation_field(u0, u1)
        s = np.linspace(-0.99, 0.99, 101)
        assert np.max(np.abs(np.array([f.F(x) for x in s]))) > 1e-3
