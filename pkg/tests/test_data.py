import numpy as np
import pytest

from qwblow.data import PolyBump, TableProfile, make_profile, zero_profile
from qwblow.errors import InputError


def test_bump_normalization():
    p = make_profile("poly_bump", M=1.0, k=4, amplitude=1.0)
    assert p.value(0.0) == 1.0
    assert p.value(1.0) == 0.0
    assert p.value(-1.0) == 0.0


def test_bump_value_direct_arithmetic():
    p = make_profile("poly_bump", M=1.0, k=4, amplitude=1.0)
    assert p.value(0.5) == pytest.approx((1 - 0.25) ** 4, abs=0)
    assert p.value(0.5) == 0.31640625


def test_support_vanishing_outside():
    for prof in (make_profile("poly_bump", M=1.0, k=4, amplitude=1.0),
                 make_profile("poly_bump", M=2.0, k=5, amplitude=-0.3)):
        for s in (2 * prof.M, -2 * prof.M, prof.M, 5.0 * prof.M):
            assert prof.value(s) == 0.0
            assert prof.d1(s) == 0.0
            assert prof.d2(s) == 0.0


def test_bump_derivatives_match_finite_differences():
    p = PolyBump(M=1.5, k=5, amplitude=0.7)
    rng = np.random.default_rng(0)
    s = rng.uniform(-1.4, 1.4, 50)
    h = 1e-6
    d1_fd = (p.value(s + h) - p.value(s - h)) / (2 * h)
    d2_fd = (p.value(s + h) - 2 * p.value(s) + p.value(s - h)) / h**2
    assert np.max(np.abs(p.d1(s) - d1_fd)) < 1e-8
    assert np.max(np.abs(p.d2(s) - d2_fd)) < 1e-3


def test_bump_even_and_c2_at_edge():
    p = PolyBump(M=1.0, k=3, amplitude=1.0)
    s = np.linspace(-2, 2, 401)
    assert np.allclose(p.value(s), p.value(-s), atol=0)
    # second derivative continuous (and zero) at the support edge for k >= 3
    assert abs(p.d2(1.0 - 1e-8)) < 1e-6
    assert p.d2(1.0) == 0.0


def test_bump_rejects_low_k_and_bad_M():
    with pytest.raises(InputError):
        make_profile("poly_bump", M=1.0, k=2, amplitude=1.0)
    with pytest.raises(InputError):
        make_profile("poly_bump", M=-1.0, k=4, amplitude=1.0)
    with pytest.raises(InputError):
        make_profile("poly_bump", M=1.0, k=4, amplitude=float("inf"))


def test_table_profile_round_trip_and_support():
    nodes = np.linspace(-1.0, 1.0, 41)
    vals = (1 - nodes**2) ** 4
    p = make_profile("sample_table", 1.0, nodes=nodes, values=vals)
    s = np.linspace(-0.9, 0.9, 101)
    ref = (1 - s**2) ** 4
    assert np.max(np.abs(p.value(s) - ref)) < 5e-4
    assert p.value(1.5) == 0.0 and p.d1(-2.0) == 0.0


def test_table_profile_rejects_non_monotone_and_uneven():
    nodes = np.array([-1.0, -0.5, -0.6, 0.5, 1.0])
    with pytest.raises(InputError):
        TableProfile(M=1.0, nodes=nodes, values=np.zeros(5))
    nodes = np.linspace(-1, 1, 21)
    vals = nodes.copy()   # odd, not even
    with pytest.raises(InputError):
        TableProfile(M=1.0, nodes=nodes, values=vals)


def test_zero_profile_flag():
    z = zero_profile(2.0)
    assert z.is_zero
    assert z.value(0.3) == 0.0
    assert not make_profile("poly_bump", M=1.0, k=4, amplitude=0.5).is_zero
