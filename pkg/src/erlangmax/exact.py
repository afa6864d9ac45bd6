"""Exact law of the sampled maximum: coefficients c_j, E M and P(M > t).

The maximum M of the Erlang-sampled walk satisfies

    P(M > t) = sum_j c_j sigma_j exp(-gamma2 (1 - sigma_j) t),

so E M = sum_j c_j sigma_j / (gamma2 (1 - sigma_j)).  Two formulas for the
c_j are provided.  The direct one is a ratio of products over the inner zeros
and degrades quickly with k because the inner zeros crowd together.  The
outer-zero one replaces those products by

    c_j = (1/k) sigma_j^+ / ((1 - sigma_j) 2 r_j) * prod_l (1 - sigma_l)
          * prod_l (1 - sigma_l / sigma_j^+),

whose last factor is exp(g_j) with |g_j| < -ln(1 - tau^k) / 2, and is the
default for every k.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceGuard, RepresentationUnstable
from .params import DerivedParams, SamplingParams, derive
from .spectral import SpectralData, roots

DIRECT_K_CAP = 64
REALNESS_TOL = 1e-10
# below this ratio of |sum| to sum |terms| the root series has lost > 6 digits
CANCELLATION_LIMIT = 1e-6
_ROW_BLOCK = 256


class Representation(enum.Enum):
    DIRECT = "Direct"
    OUTER_ZERO = "OuterZero"


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    c: np.ndarray
    representation: Representation
    g: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class MaxLaw:
    params: SamplingParams
    derived: DerivedParams
    spectral: SpectralData
    coeffs: CoefficientSet


def clog1p(w):
    """Principal log(1 + w) for complex w, accurate when |w| is small."""
    w = np.asarray(w, dtype=complex)
    x, y = w.real, w.imag
    re = 0.5 * np.log1p(2.0 * x + x * x + y * y)
    im = np.arctan2(y, 1.0 + x)
    return re + 1j * im


def conjugate_sum(terms: np.ndarray) -> tuple[float, float]:
    """Sum terms with t_{k-j} = conj(t_j); returns (real sum, relative imaginary residue).

    The real part is accumulated as t_0 + 2 Re t_j (j < k/2) (+ t_{k/2}) with
    fsum; the residue is |sum Im t_j| / sum |t_j| over the unpaired sum.
    """
    t = np.asarray(terms, dtype=complex)
    k = t.size
    half = (k - 1) // 2
    parts = [t[0].real]
    parts.extend(2.0 * t[1 : half + 1].real)
    if k % 2 == 0 and k > 1:
        parts.append(t[k // 2].real)
    total = math.fsum(parts)
    scale = float(np.sum(np.abs(t)))
    resid = abs(math.fsum(t.imag)) / scale if scale > 0 else 0.0
    return total, resid


def _log_inner_product(spectral: SpectralData) -> complex:
    """sum_{l>=1} log(1 - sigma_l), real up to roundoff by conjugate symmetry."""
    logs = clog1p(-spectral.sigma_minus[1:])
    return complex(math.fsum(logs.real), math.fsum(logs.imag))


def outer_exponents(spectral: SpectralData) -> np.ndarray:
    """g_j = sum_l log(1 - sigma_l^- / sigma_j^+) for j = 0..k-1."""
    k = spectral.k
    sig = spectral.sigma_minus
    sp = spectral.sigma_plus
    g = np.empty(k, dtype=complex)
    # rows j and k - j are conjugate; evaluate j <= k/2 and mirror
    top = k // 2 + 1
    for start in range(0, top, _ROW_BLOCK):
        stop = min(start + _ROW_BLOCK, top)
        w = -sig[None, :] / sp[start:stop, None]
        logs = clog1p(w)
        for i, row in enumerate(logs, start=start):
            g[i] = complex(math.fsum(row.real), math.fsum(row.imag))
    for j in range(top, k):
        g[j] = np.conj(g[k - j])
    g[0] = g[0].real
    if k % 2 == 0 and k > 1:
        g[k // 2] = g[k // 2].real
    g.setflags(write=False)
    return g


def coeffs_outer(spectral: SpectralData) -> CoefficientSet:
    """Coefficients from the outer-zero representation, products in log form."""
    k = spectral.k
    d = spectral.one_minus_rho
    L1 = _log_inner_product(spectral).real
    g = outer_exponents(spectral)
    c = np.empty(k, dtype=complex)
    c[0] = math.exp(2.0 * L1) / k
    if k > 1:
        j = slice(1, None)
        pref = spectral.sigma_plus[j] / (
            spectral.one_minus_sigma[j] * 2.0 * spectral.sqrt_disc[j]
        )
        c[j] = pref * d * np.exp(L1 + g[j]) / k
        _enforce_conjugate(c)
    c.setflags(write=False)
    return CoefficientSet(c=c, representation=Representation.OUTER_ZERO, g=g)


def coeffs_direct(spectral: SpectralData, cap: int = DIRECT_K_CAP) -> CoefficientSet:
    """Coefficients from the ratio-of-products formula; gated to k <= cap."""
    k = spectral.k
    if k > cap:
        raise RepresentationUnstable(
            f"direct representation requested for k={k} > cap={cap}"
        )
    sig = spectral.sigma_minus
    num_f = -spectral.one_minus_sigma  # sigma_l - 1
    den_f = sig[None, :] / sig[:, None] - 1.0  # [j, l] = sigma_l / sigma_j - 1
    mask = ~np.eye(k, dtype=bool)
    c = np.empty(k, dtype=complex)
    for j in range(k):
        m = mask[j]
        c[j] = np.prod(num_f[m]) / np.prod(den_f[j, m])
    c[0] = c[0].real
    _enforce_conjugate(c)
    c.setflags(write=False)
    return CoefficientSet(c=c, representation=Representation.DIRECT)


def _enforce_conjugate(c: np.ndarray) -> None:
    k = c.size
    for j in range(1, (k - 1) // 2 + 1):
        c[k - j] = np.conj(c[j])
    if k % 2 == 0 and k > 1:
        c[k // 2] = c[k // 2].real


def max_law(params: SamplingParams, derived: DerivedParams | None = None) -> MaxLaw:
    """Roots and outer-zero coefficients; ``derived`` overrides derive(params)."""
    if derived is None:
        derived = derive(params)
    spectral = roots(params.k, derived.rho, derived.one_minus_rho)
    return MaxLaw(params, derived, spectral, coeffs_outer(spectral))


def expected_max_terms(law: MaxLaw) -> np.ndarray:
    """Per-j terms c_j sigma_j / (gamma2 (1 - sigma_j)) of the expected maximum."""
    beta = law.params.beta
    sp, c = law.spectral, law.coeffs.c
    d = sp.one_minus_rho
    t = np.empty(sp.k, dtype=complex)
    # j = 0: 1 / gamma2 = (1 - rho) / (2 beta) cancels 1 - sigma_0 = 1 - rho
    t[0] = c[0].real * sp.rho / (2.0 * beta)
    t[1:] = d / (2.0 * beta) * c[1:] * sp.sigma_minus[1:] / sp.one_minus_sigma[1:]
    return t


def expected_max_from_law(law: MaxLaw) -> float:
    """Root-series value of E M.

    When E M is of order tau^k the terms cancel beyond binary64 resolution;
    in that case the positive-term series of :func:`expected_max_spitzer` is
    returned instead.
    """
    terms = expected_max_terms(law)
    total, resid = conjugate_sum(terms)
    if resid > REALNESS_TOL:
        raise ArithmeticError(f"expected-maximum series not real: residue {resid:.3g}")
    if total <= CANCELLATION_LIMIT * float(np.sum(np.abs(terms))):
        return expected_max_spitzer(law.params, law.derived)
    return total


def expected_max(params: SamplingParams) -> float:
    """E M for Erlang(k, k omega) sampling, via the outer-zero coefficients."""
    return expected_max_from_law(max_law(params))


def positive_part_mean(n_phases: int, gamma1: float, gamma2: float) -> float:
    """E (X - Y)^+ for X ~ Erlang(N, gamma2), Y ~ Erlang(N, gamma1).

    Conditioning on Y gives (1/gamma2) sum_{m<N} (N - m) NB(m; N, p) with
    NB the negative binomial pmf, p = gamma1 / (gamma1 + gamma2).
    """
    N = int(n_phases)
    p = gamma1 / (gamma1 + gamma2)
    q = gamma2 / (gamma1 + gamma2)
    m = np.arange(N, dtype=float)
    steps = np.log(q * (m[:-1] + N) / (m[:-1] + 1.0))
    logpmf = N * math.log(p) + np.concatenate(([0.0], np.cumsum(steps)))
    top = float(logpmf.max())
    return math.exp(top) * float(np.sum((N - m) * np.exp(logpmf - top))) / gamma2


def expected_max_spitzer(
    params: SamplingParams,
    derived: DerivedParams | None = None,
    tol: float = 1e-17,
    max_terms: int = 1_000_000,
) -> float:
    """E M = sum_n E S_n^+ / n, every term positive.

    S_n is the walk after n steps, Erlang(nk, gamma2) - Erlang(nk, gamma1).
    Converges fast when E M is small and slowly as rho -> 1, where the root
    series is the better tool.
    """
    d = derive(params) if derived is None else derived
    k = params.k
    parts = []
    total = 0.0
    for n in range(1, max_terms + 1):
        term = positive_part_mean(n * k, d.gamma1, d.gamma2) / n
        parts.append(term)
        total += term
        if term <= tol * total:
            return math.fsum(parts)
    raise ConvergenceGuard(f"Spitzer series not converged after {max_terms} terms")


def expected_max_k1(beta: float, omega: float) -> float:
    """Closed form for exponential sampling: gamma1 / (gamma2 (gamma2 - gamma1))."""
    d = derive(SamplingParams(beta, omega, 1))
    return d.gamma1 / (d.gamma2 * 2.0 * beta)


def tail_prob(t, law: MaxLaw):
    """P(M > t) for scalar or array t >= 0."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be >= 0")
    sp, c = law.spectral, law.coeffs.c
    rate = 2.0 * law.params.beta * sp.one_minus_sigma / sp.one_minus_rho
    rate[0] = 2.0 * law.params.beta
    amp = c * sp.sigma_minus
    flat = t_arr.reshape(-1)
    out = np.empty(flat.size)
    for i, ti in enumerate(flat):
        val, resid = conjugate_sum(amp * np.exp(-rate * ti))
        if resid > REALNESS_TOL and abs(val) > 1e-300:
            raise ArithmeticError(f"tail series not real at t={ti}: residue {resid:.3g}")
        out[i] = val
    if t_arr.ndim == 0:
        return float(out[0])
    return out.reshape(t_arr.shape)
