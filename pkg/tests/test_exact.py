import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from erlangmax import mc
from erlangmax.errors import RepresentationUnstable
from erlangmax.exact import (
    Representation,
    coeffs_direct,
    coeffs_outer,
    conjugate_sum,
    expected_max,
    expected_max_k1,
    max_law,
    tail_prob,
)
from erlangmax.params import SamplingParams, derive
from erlangmax.spectral import roots

GOLDEN = (3 - math.sqrt(5)) / 4


def naive_direct(k, rho):
    # straight transcription of the ratio of products, no shared helpers
    s = rho * np.exp(2j * np.pi * np.arange(k) / k)
    a = (1 + rho) / 2
    s = a - np.sqrt(a * a - s + 0j)
    c = []
    for j in range(k):
        num = np.prod([s[l] - 1 for l in range(k) if l != j])
        den = np.prod([s[l] / s[j] - 1 for l in range(k) if l != j])
        c.append(num / den)
    return np.array(c), s


def test_k1_coefficient_is_one():
    for rho in (0.1, 0.5, 0.99):
        sp = roots(1, rho)
        assert coeffs_outer(sp).c[0] == pytest.approx(1.0, rel=1e-14)
        assert coeffs_direct(sp).c[0] == 1.0


def test_direct_cap():
    with pytest.raises(RepresentationUnstable):
        coeffs_direct(roots(65, 0.5))
    assert coeffs_direct(roots(80, 0.5), cap=100).representation is Representation.DIRECT


def test_direct_matches_naive_transcription():
    c_ref, _ = naive_direct(6, 0.6)
    assert np.allclose(coeffs_direct(roots(6, 0.6)).c, c_ref, rtol=1e-10)


def test_k8_representations_agree():
    sp = roots(8, 0.6)
    a, b = coeffs_direct(sp).c, coeffs_outer(sp).c
    assert np.max(np.abs(a - b)) / np.max(np.abs(b)) < 1e-8


@pytest.mark.parametrize("k", [1, 2, 3, 8, 16, 33, 64])
@pytest.mark.parametrize("rho", [0.3, 0.6, 0.9, 0.99])
def test_representation_equivalence(k, rho):
    sp = roots(k, rho)
    a, b = coeffs_direct(sp).c, coeffs_outer(sp).c
    assert np.max(np.abs(a - b)) / np.max(np.abs(b)) <= 1e-8


def test_c0_product_k2():
    sp = roots(2, 0.5)
    c0 = np.prod((1 - sp.sigma_minus[1:]) ** 2).real / 2
    assert coeffs_direct(sp).c[0].real == pytest.approx(c0, rel=1e-13)
    assert coeffs_outer(sp).c[0].real == pytest.approx(c0, rel=1e-13)


@pytest.mark.parametrize("k", [4, 64, 257])
def test_c0_product_general(k):
    sp = roots(k, 0.8)
    c0 = math.exp(2 * np.sum(np.log(np.abs(1 - sp.sigma_minus[1:])))) / k
    assert coeffs_outer(sp).c[0].real == pytest.approx(c0, rel=1e-12)


def test_outer_exponent_bounds_k64():
    k, rho = 64, 0.95
    sp = roots(k, rho)
    g = coeffs_outer(sp).g
    tau = 4 * rho / (1 + rho) ** 2
    bound = -0.5 * math.log(1 - tau**k)
    assert np.all(g.real < 0)
    assert np.all(np.abs(g) < bound)


@settings(max_examples=60, deadline=None)
@given(k=st.integers(1, 600), rho=st.floats(0.05, 0.999))
def test_coefficient_set_invariants(k, rho):
    sp = roots(k, rho)
    cs = coeffs_outer(sp)
    c = cs.c
    j = np.arange(1, k)
    assert np.array_equal(c[k - j], np.conj(c[j]))
    assert c[0].imag == 0
    terms = c * sp.sigma_minus
    total, resid = conjugate_sum(terms)
    # P(M > 0) can sit far below the roundoff of its own terms when k (1 - rho)^2 is large
    floor = 64 * k * np.finfo(float).eps * np.sum(np.abs(terms))
    assert -floor < total < 1
    assert resid < 1e-10


def test_conjugate_sum_reports_residue():
    t = np.array([1.0, 1 + 1j, 1 - 1j])
    assert conjugate_sum(t) == (3.0, 0.0)
    total, resid = conjugate_sum(np.array([1.0, 1 + 1j, 1 + 1j]))
    assert resid > 0.1


def test_expected_max_golden():
    assert expected_max(SamplingParams(1.0, 2.0, 1)) == pytest.approx(GOLDEN, abs=1e-15)
    assert expected_max_k1(1.0, 2.0) == pytest.approx(GOLDEN, abs=1e-15)
    hand = (math.sqrt(5) - 1) / ((1 + math.sqrt(5)) * 2)
    assert expected_max_k1(1.0, 2.0) == pytest.approx(hand, rel=1e-15)


@pytest.mark.parametrize("omega", [1e-3, 0.3, 2.0, 77.0, 1e6])
@pytest.mark.parametrize("beta", [0.5, 1.0, 3.0])
def test_k1_reduction(beta, omega):
    v = expected_max(SamplingParams(beta, omega, 1))
    assert abs(v - expected_max_k1(beta, omega)) <= 1e-12 * max(1.0, v)
    assert v == pytest.approx(derive(SamplingParams(beta, omega, 1)).rho / (2 * beta), rel=1e-14)


def test_k1_large_omega_limit():
    assert expected_max_k1(1.0, 1e12) == pytest.approx(0.5, rel=1e-5)
    assert abs(expected_max_k1(1.0, 50.0) - 0.4) < 0.01


@settings(max_examples=60, deadline=None)
@given(
    beta=st.floats(0.1, 10.0),
    omega=st.floats(1e-3, 1e6),
    k=st.integers(1, 512),
)
def test_expected_max_range(beta, omega, k):
    v = expected_max(SamplingParams(beta, omega, k))
    assert 0 < v < 0.5 / beta


def test_expected_max_increases_with_k_at_fixed_omega():
    vals = [expected_max(SamplingParams(1.0, 10.0, k)) for k in (1, 2, 4, 16, 256)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize(
    "beta,omega,k", [(1.0, 2.0, 1), (1.0, 10.0, 4), (1.0, 5.0, 16), (1.0, 0.9, 200), (0.3, 0.05, 64)]
)
def test_spitzer_series_agrees(beta, omega, k):
    from erlangmax.exact import expected_max_from_law, expected_max_spitzer

    p = SamplingParams(beta, omega, k)
    assert expected_max_from_law(max_law(p)) == pytest.approx(expected_max_spitzer(p), rel=1e-12)


def test_tiny_expected_max_stays_positive():
    # here every root-series term is ~1e-4 while E M ~ 1e-20
    from erlangmax.exact import expected_max_spitzer, expected_max_terms

    p = SamplingParams(9.625, 1.0, 166)
    terms = expected_max_terms(max_law(p))
    assert np.max(np.abs(terms)) > 1e-5
    v = expected_max(p)
    assert 0 < v < 1e-15
    assert v == expected_max_spitzer(p)


def test_large_k_runs():
    v = expected_max(SamplingParams(1.0, 10.0, 4096))
    assert 0.3 < v < 0.5


def test_expected_max_k4_against_monte_carlo(maxima_k4):
    p, cfg, maxima, _ = maxima_k4
    est = mc.summarize(maxima, p, cfg)
    assert abs(expected_max(p) - est.mean) < 3 * est.stderr


def test_tail_k1_closed_form():
    p = SamplingParams(1.0, 2.0, 1)
    law = max_law(p)
    d = law.derived
    t = np.linspace(0, 4, 41)
    assert np.allclose(tail_prob(t, law), d.gamma1 / d.gamma2 * np.exp(-2 * t), rtol=1e-13, atol=0)


def test_tail_properties():
    law = max_law(SamplingParams(1.0, 10.0, 4))
    t = np.linspace(0, 6, 100)
    tail = tail_prob(t, law)
    assert 0 < tail[0] < 1
    assert np.all(np.diff(tail) <= 1e-15)
    assert tail_prob(50.0, law) < 1e-30
    assert isinstance(tail_prob(0.5, law), float)
    with pytest.raises(ValueError):
        tail_prob(-1.0, law)


@pytest.mark.parametrize("k,omega", [(1, 2.0), (4, 10.0), (16, 100.0), (64, 3.0)])
def test_tail_quadrature_gives_mean(k, omega):
    p = SamplingParams(1.0, omega, k)
    law = max_law(p)
    val, _ = integrate.quad(lambda t: tail_prob(t, law), 0, np.inf, epsabs=1e-12, epsrel=1e-12, limit=200)
    assert abs(val - expected_max(p)) < 1e-6


def sparre_andersen_p0(p, n_max=100000):
    # P(M > 0) = 1 - exp(-sum_n P(S_n > 0) / n); P(S_n > 0) is a negative binomial cdf
    d = derive(p)
    prob = d.gamma1 / (d.gamma1 + d.gamma2)
    acc = 0.0
    for n in range(1, n_max):
        N = n * p.k
        m = np.arange(N)
        logpmf = [math.lgamma(x + N) - math.lgamma(N) - math.lgamma(x + 1) for x in m]
        logpmf = np.array(logpmf) + N * math.log(prob) + m * math.log(1 - prob)
        term = float(np.sum(np.exp(logpmf))) / n
        acc += term
        if term < 1e-17 * acc:
            break
    return -math.expm1(-acc)


@pytest.mark.parametrize("beta,omega,k", [(1.0, 2.0, 1), (1.0, 10.0, 4), (2.0, 3.0, 16), (1.0, 0.9, 200)])
def test_tail_at_zero_sparre_andersen(beta, omega, k):
    p = SamplingParams(beta, omega, k)
    assert tail_prob(0.0, max_law(p)) == pytest.approx(sparre_andersen_p0(p), rel=1e-10)


def test_tail_at_zero_matches_coefficient_sum():
    law = max_law(SamplingParams(1.0, 10.0, 4))
    total, _ = conjugate_sum(law.coeffs.c * law.spectral.sigma_minus)
    assert tail_prob(0.0, law) == pytest.approx(total, rel=1e-14)
