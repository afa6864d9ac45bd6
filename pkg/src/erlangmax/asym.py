"""Asymptotic formulas for the expected maximum and their building blocks.

Central object is the unit-root power sum

    S_k(s) = sum_{j=1}^{k-1} (1 - u_j)^(-s),   u_j = exp(2 pi i j / k),

whose large-k expansion is k + 2 sum_l beta_l(s) zeta(s - l) k^(s - l) (with
leading k/2 and the l = s - 1 term dropped for s = 1, 2, ...).  At s = 1/2 it
yields the discretization constant D_k, and E M = 1/(2 beta) - D_k / sqrt(omega)
+ O(1/omega) uniformly in k.

Functions that take ``dps`` can evaluate in mpmath at that many digits.  Only
the remainder-order experiments need this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import ConditionViolated, ConvergenceGuard, DomainError
from .exact import conjugate_sum
from .params import DerivedParams, SamplingParams, derive
from .specfun import beta_l, zeta
from .spectral import SpectralData, one_minus_unit_roots

SQRT2 = math.sqrt(2.0)


# ------------------------------------------------------------ power sums


def _power_sum_terms(k: int, s: float) -> list[float]:
    # Re (1 - u_j)^(-s) = (2 sin(pi j/k))^(-s) cos(s (pi/2 - pi j/k)); j and k-j agree
    half = (k - 1) // 2
    j = np.arange(1, half + 1)
    x = np.pi * j / k
    vals = 2.0 * (2.0 * np.sin(x)) ** (-s) * np.cos(s * (0.5 * np.pi - x))
    terms = list(vals)
    if k % 2 == 0 and k > 1:
        terms.append(2.0 ** (-s))  # j = k/2: 1 - u = 2
    return terms


def _power_sum_terms_mp(k: int, s):
    out = []
    for j in range(1, (k - 1) // 2 + 1):
        x = mpmath.mpf(j) / k
        out.append(2 * (2 * mpmath.sinpi(x)) ** (-s) * mpmath.cospi(s * (mpmath.mpf(1) / 2 - x)))
    if k % 2 == 0 and k > 1:
        out.append(mpmath.mpf(2) ** (-s))
    return out


def s_k_exact(k: int, s: float, dps: int | None = None):
    """S_k(s) by direct summation of the real parts."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k!r}")
    k = int(k)
    if dps is None:
        return math.fsum(_power_sum_terms(k, float(s)))
    with mpmath.workdps(dps + 5):
        val = mpmath.fsum(_power_sum_terms_mp(k, mpmath.mpf(s)))
    return val


def _is_positive_integer(s) -> bool:
    return s >= 1 and s == int(s)


def default_p(s: float) -> int:
    """Smallest p >= 0 with remainder exponent s - 2p - 1 <= -3 and s + 2p > 0."""
    p = max(0, math.ceil((float(s) + 2.0) / 2.0))
    while float(s) + 2 * p <= 0:
        p += 1
    return p


@dataclass(frozen=True)
class ZetaExpansion:
    """Evaluated truncation of the large-k expansion of S_k(s).

    ``terms[i]`` is 2 beta_l(s) zeta(s - l) k^(s - l) for ``l = orders[i]``.
    ``exact`` is set for positive integer s, where the sum is a polynomial in k
    and carries no remainder.
    """

    s: float
    p: int
    k: int
    leading: float
    terms: tuple
    orders: tuple
    value: float
    remainder_order: float
    exact: bool = False


def s_k_asym(k: int, s: float, p: int | None = None, dps: int | None = None) -> ZetaExpansion:
    """Truncated expansion of S_k(s) through l = 2p."""
    if p is None:
        p = default_p(s)
    if s + 2 * p <= 0:
        raise DomainError(f"need s + 2p > 0, got s={s}, p={p}")
    if 2 * p > 64:
        raise DomainError("p must be <= 32")
    k = int(k)
    integer = _is_positive_integer(s)
    ctx = mpmath.workdps(dps + 5) if dps is not None else _Null()
    with ctx:
        kk = mpmath.mpf(k) if dps is not None else float(k)
        if integer:
            K = int(s)
            # only l = K, K-2, ... survive: odd l + K kills the cosine, zeta(-2m) = 0
            orders = tuple(range(K % 2, K + 1, 2))
            leading = kk / 2
        else:
            orders = tuple(range(0, 2 * p + 1))
            leading = kk
        terms = []
        for l in orders:
            b = beta_l(s, l, dps)
            z = zeta(s - l, dps)
            terms.append(2 * b * z * kk ** (s - l))
        value = leading + (mpmath.fsum(terms) if dps is not None else math.fsum(terms))
    return ZetaExpansion(
        s=s,
        p=p,
        k=k,
        leading=leading,
        terms=tuple(terms),
        orders=orders,
        value=value,
        remainder_order=float(s) - 2 * p - 1,
        exact=integer,
    )


class _Null:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


# ------------------------------------------------ discretization constant


LIMIT_D = -zeta(0.5) / math.sqrt(2.0 * math.pi)
FIRST_ORDER_D = -math.sqrt(math.pi) * zeta(-0.5) / (2.0 * SQRT2)


@dataclass(frozen=True)
class DiscretizationConstant:
    """D_k = (k - S_k(1/2)) / sqrt(2k), so that E M ~ 1/(2 beta) - D_k / sqrt(omega).

    ``phi`` is the same constant in the normalisation
    E M ~ 1/(2 beta) - phi_k / sqrt(2 pi omega), i.e. phi_k = sqrt(2 pi) D_k.
    Its limit is -zeta(1/2) > 0; ``phi_limit_as_zeta_half`` keeps the value
    zeta(1/2) for comparison, since the two differ in sign.
    """

    k: int
    value: float
    limit: float = LIMIT_D
    first_order_coeff: float = FIRST_ORDER_D
    phi: float = field(init=False)
    phi_limit: float = field(init=False)
    phi_limit_as_zeta_half: float = field(init=False)

    def __post_init__(self):
        root = math.sqrt(2.0 * math.pi)
        object.__setattr__(self, "phi", root * self.value)
        object.__setattr__(self, "phi_limit", root * self.limit)
        object.__setattr__(self, "phi_limit_as_zeta_half", zeta(0.5))

    @property
    def second_order_residual(self) -> float:
        return self.value - self.limit - self.first_order_coeff / self.k


def discretization_constant(k: int) -> DiscretizationConstant:
    if int(k) != k or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k!r}")
    k = int(k)
    if k == 1:
        return DiscretizationConstant(k=1, value=1.0 / SQRT2)
    diff = math.fsum([float(k)] + [-t for t in _power_sum_terms(k, 0.5)])
    return DiscretizationConstant(k=k, value=diff / math.sqrt(2.0 * k))


def expected_max_asym(params: SamplingParams) -> float:
    """1/(2 beta) - D_k / sqrt(omega), the large-omega law uniform in k."""
    D = discretization_constant(params.k).value
    return 0.5 / params.beta - D / math.sqrt(params.omega)


# ------------------------------------------------- deterministic sampling


def gaussian_rw_terms(beta: float, omega: float, R: int = 30) -> list[float]:
    """The first R summands of the zeta(-1/2 - r) series, prefactor included.

    Stops early once a summand drops below 1e-16 in magnitude.
    """
    if R < 0 or R > 30:
        raise ValueError("R must lie in 0..30")
    if not omega > beta / (2.0 * math.sqrt(math.pi)):
        raise ConvergenceGuard(
            f"series needs omega > beta / (2 sqrt(pi)); got beta={beta}, omega={omega}"
        )
    pref = beta * beta / (omega * math.sqrt(2.0 * math.pi * omega))
    x = -beta * beta / (2.0 * omega)
    out = []
    for r in range(R):
        term = pref * zeta(-0.5 - r) / (math.factorial(r) * (2 * r + 1) * (2 * r + 2)) * x**r
        out.append(term)
        if abs(term) < 1e-16:
            break
    return out


def gaussian_rw_expansion(beta: float, omega: float, R: int = 30) -> float:
    """Expected maximum of the Gaussian random walk with N(-beta/omega, 1/omega) steps."""
    head = [
        0.5 / beta,
        zeta(0.5) / math.sqrt(2.0 * math.pi * omega),
        beta / (4.0 * omega),
    ]
    return math.fsum(head + gaussian_rw_terms(beta, omega, R))


# ---------------------------------------------------------- small omega


@dataclass(frozen=True)
class SmallOmegaBound:
    Rk_bound: float
    order_estimate: float
    tau_k: float


def small_omega_bound(params: SamplingParams) -> SmallOmegaBound:
    """Upper bound on R_k and the envelope tau^k sqrt(-ln tau^k)."""
    d = derive(params)
    k = params.k
    omt = d.one_minus_tau_k
    if omt <= 0.0:
        raise DomainError("tau^k rounds to 1; bound undefined")
    log_tk = k * math.log1p(-d.one_minus_tau)
    bound = (
        (1.0 + d.rho)
        / (2.0 * params.beta * d.one_minus_rho)
        / math.sqrt(math.pi * (k - 0.75))
        * d.tau_k
        / omt
    )
    return SmallOmegaBound(
        Rk_bound=bound,
        order_estimate=d.tau_k * math.sqrt(-log_tk),
        tau_k=d.tau_k,
    )


def r_k_direct(spectral: SpectralData, derived: DerivedParams) -> float:
    """R_k = (1 - rho)/(2 beta k) sum_j sigma_j^+ sigma_j / ((1 - sigma_j)^2 2 r_j)."""
    sp = spectral
    terms = sp.sigma_plus * sp.sigma_minus / (sp.one_minus_sigma**2 * 2.0 * sp.sqrt_disc)
    total, _ = conjugate_sum(terms)
    return sp.one_minus_rho / (2.0 * derived.beta * sp.k) * total


# ------------------------------------------- near-unit-load root approximation


def approx_conditions(k: int, one_minus_rho: float) -> bool:
    return one_minus_rho < 1.0 / 3.0 and 0.125 * one_minus_rho**2 * math.sqrt(k) < 1.0 / 3.0


def one_minus_sigma_approx(
    j: int, k: int, rho: float, one_minus_rho: float | None = None, corrected: bool = False
) -> complex:
    """sqrt(1 - u_j) (1 - eps (1 - 1/sqrt(1 - u_j))), eps = d/2 + d^2/8, d = 1 - rho.

    Expanding the exact root gives an extra d^2/8 (1/sqrt(1 - u_j) - 1) at
    second order, so this form is off by O(d^2 / |sqrt(1 - u_j)|) rather than
    O(d^3 / |sqrt(1 - u_j)|).  ``corrected=True`` adds that term back.
    """
    d = 1.0 - rho if one_minus_rho is None else one_minus_rho
    if not (1 <= j <= k - 1):
        raise ValueError("j must lie in 1..k-1")
    if not approx_conditions(k, d):
        raise ConditionViolated(
            f"need 1 - rho < 1/3 and (1 - rho)^2 sqrt(k) / 8 < 1/3 (rho={rho}, k={k})"
        )
    eps = 0.5 * d + 0.125 * d * d
    w = complex(np.sqrt(one_minus_unit_roots(k)[j]))
    out = w * (1.0 - eps * (1.0 - 1.0 / w))
    if corrected:
        out += 0.125 * d * d * (1.0 / w - 1.0)
    return out


# ------------------------------------------------------- order utilities


def doubling_ratios(errors) -> list[float]:
    """|e(k)| / |e(2k)| for consecutive entries of a doubling sequence."""
    e = [abs(float(x)) for x in errors]
    return [a / b for a, b in zip(e[:-1], e[1:])]


def fit_constant(xs, ys, exponent: float) -> float:
    """Least-squares C in log|y| = log C + exponent log x."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.abs(np.asarray(ys, dtype=float)))
    return float(np.exp(np.mean(ly - exponent * lx)))


def fit_power_law(xs, ys) -> tuple[float, float]:
    """Least-squares (C, exponent) for |y| ~ C x^exponent."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.abs(np.asarray(ys, dtype=float)))
    slope, icpt = np.polyfit(lx, ly, 1)
    return float(np.exp(icpt)), float(slope)
