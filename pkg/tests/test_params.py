import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from erlangmax.params import SamplingParams, derive, omega_from_rho, rho_from_gamma


def quadratic_rho(beta, omega, k):
    # root in (0, 1) of k omega (1 - r)^2 - 2 beta^2 r, by numpy's polynomial solver
    a = k * omega
    r = np.roots([a, -2 * a - 2 * beta**2, a])
    r = r[(r.real > 0) & (r.real < 1)].real
    assert r.size == 1
    return float(r[0])


def test_golden_point():
    d = derive(SamplingParams(1.0, 2.0, 1))
    assert d.rho == pytest.approx((3 - math.sqrt(5)) / 2, rel=1e-15)
    assert d.gamma2 == pytest.approx(1 + math.sqrt(5), rel=1e-15)
    assert d.gamma1 == pytest.approx(math.sqrt(5) - 1, rel=1e-15)
    assert d.one_minus_rho == pytest.approx((math.sqrt(5) - 1) / 2, rel=1e-15)


def test_omega_from_rho_inverts_golden_point():
    assert omega_from_rho((3 - math.sqrt(5)) / 2, 1, 1.0) == pytest.approx(2.0, rel=1e-14)


def test_omega_vanishes_with_rho():
    assert omega_from_rho(1e-12, 4, 1.0) < 1e-11


@pytest.mark.parametrize("omega", [1e-3, 0.5, 10.0, 1e4])
@pytest.mark.parametrize("k", [1, 3, 64])
def test_matches_polynomial_root(omega, k):
    d = derive(SamplingParams(1.3, omega, k))
    assert d.rho == pytest.approx(quadratic_rho(1.3, omega, k), rel=1e-10)


def test_rejects_bad_input():
    for bad in [(0.0, 1.0, 1), (1.0, -1.0, 1), (1.0, math.inf, 1), (math.nan, 1.0, 1)]:
        with pytest.raises(ValueError):
            SamplingParams(*bad)
    with pytest.raises(ValueError):
        SamplingParams(1.0, 1.0, 0)
    with pytest.raises(ValueError):
        SamplingParams(1.0, 1.0, 2.5)
    with pytest.raises(ValueError):
        omega_from_rho(1.0, 1, 1.0)
    with pytest.raises(ValueError):
        omega_from_rho(0.0, 1, 1.0)


def test_grid_round_trip_and_two_definitions():
    for omega in np.logspace(-6, 9, 31):
        for k in (1, 2, 5, 64, 1000, 4096):
            p = SamplingParams(1.0, float(omega), k)
            d = derive(p)
            assert rho_from_gamma(d, 1.0) == pytest.approx(d.rho, rel=1e-12)
            again = derive(SamplingParams.from_rho(d.rho, k, 1.0))
            assert again.rho == pytest.approx(d.rho, rel=1e-12)
            assert abs(d.gamma2 - d.gamma1 - 2.0) <= 1e-15 * d.gamma2
            # the quadratic itself, written without cancellation
            lhs = k * d.one_minus_rho**2 * omega
            assert lhs == pytest.approx(2.0 * d.rho, rel=1e-12)


def test_one_minus_rho_scales_like_inverse_sqrt_omega():
    vals = []
    omega = 1e2
    while omega <= 1e8:
        d = derive(SamplingParams(1.0, omega, 4))
        vals.append(d.one_minus_rho * math.sqrt(omega))
        omega *= 2
    vals = np.array(vals)
    assert np.all(np.diff(vals) > 0)  # monotone
    assert vals.max() < math.sqrt(2.0 / 4) * 1.000001  # limit sqrt(2 beta^2 / k)


def test_tau_identities():
    d = derive(SamplingParams(0.7, 3.0, 5))
    assert d.tau == pytest.approx(1.0 - ((1 - d.rho) / (1 + d.rho)) ** 2, rel=1e-14)
    assert 0 < d.tau < 1
    assert d.tau_k == pytest.approx(d.tau**5, rel=1e-13)
    assert d.tau_k + d.one_minus_tau_k == pytest.approx(1.0, rel=1e-15)
    assert d.eps == pytest.approx(0.5 * (1 - d.rho) + 0.125 * (1 - d.rho) ** 2, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(
    beta=st.floats(1e-3, 1e3),
    omega=st.floats(1e-6, 1e9),
    k=st.integers(1, 4096),
)
def test_derived_invariants_hold(beta, omega, k):
    d = derive(SamplingParams(beta, omega, k))
    assert 0 < d.rho < 1
    assert d.rho + d.one_minus_rho == pytest.approx(1.0, rel=1e-15)
    assert abs(d.gamma2 - d.gamma1 - 2 * beta) <= 1e-15 * d.gamma2
    assert rho_from_gamma(d, beta) == pytest.approx(d.rho, rel=1e-12)
    assert 0 < d.tau <= 1


@settings(max_examples=200, deadline=None)
@given(rho=st.floats(1e-9, 1 - 1e-9), k=st.integers(1, 4096), beta=st.floats(1e-2, 1e2))
def test_rho_round_trip(rho, k, beta):
    p = SamplingParams.from_rho(rho, k, beta)
    assert derive(p).rho == pytest.approx(rho, rel=1e-12)
