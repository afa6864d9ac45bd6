"""Unit roots and the inner/outer zeros of P(sigma) = [sigma (1 + rho - sigma)]^k - rho^k.

For each unit root u_j the quadratic sigma (1 + rho - sigma) = rho u_j has the
two solutions a -/+ sqrt(a^2 - rho u_j) with a = (1 + rho) / 2.  The radicand
is rewritten as ((1 - rho) / 2)^2 + rho (1 - u_j) so that neither it nor
1 - sigma_j loses digits when rho is close to 1.  Indices j and k - j are
built from the same sines, which makes the conjugate symmetry exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Roots for one (k, rho), stored in index order j = 0..k-1.

    Besides the two root families, the cancellation-free auxiliaries used by
    the coefficient formulas are kept: ``one_minus_u`` (1 - u_j),
    ``sqrt_disc`` (the principal root r_j, so that sigma_j^- = a - r_j and
    1 + rho - 2 sigma_j^- = 2 r_j) and ``one_minus_sigma`` (1 - sigma_j^-).
    """

    k: int
    rho: float
    one_minus_rho: float
    unit_roots: np.ndarray
    one_minus_u: np.ndarray
    sqrt_disc: np.ndarray
    sigma_minus: np.ndarray
    sigma_plus: np.ndarray
    one_minus_sigma: np.ndarray

    @property
    def sigma(self) -> np.ndarray:
        """Alias for the inner zeros, the sigma_j of the expected-maximum series."""
        return self.sigma_minus


def _mirror_index(k: int):
    j = np.arange(k)
    m = np.minimum(j, k - j)
    sign = np.where(j <= k - j, 1.0, -1.0)
    return m, sign


def unit_roots(k: int) -> np.ndarray:
    """u_j = exp(2 pi i j / k), j = 0..k-1."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k!r}")
    k = int(k)
    m, sign = _mirror_index(k)
    theta = 2.0 * np.pi * m / k
    u = np.cos(theta) + 1j * sign * np.sin(theta)
    _exact_quarters(u, k, (1j, -1.0, -1j))
    return u


def _exact_quarters(arr, k: int, values) -> None:
    # values at j = k/4, k/2, 3k/4 where sin and cos of multiples of pi/2 are known
    if k % 2 == 0 and k > 1:
        arr[k // 2] = values[1]
    if k % 4 == 0:
        arr[k // 4] = values[0]
        arr[3 * k // 4] = values[2]


def one_minus_unit_roots(k: int) -> np.ndarray:
    """1 - u_j = 2 sin^2(pi j / k) - i sin(2 pi j / k), accurate near j = 0."""
    k = int(k)
    m, sign = _mirror_index(k)
    half = np.pi * m / k
    omu = 2.0 * np.sin(half) ** 2 - 1j * sign * np.sin(2.0 * half)
    _exact_quarters(omu, k, (1.0 - 1j, 2.0, 1.0 + 1j))
    return omu


def roots(k: int, rho: float, one_minus_rho: float | None = None) -> SpectralData:
    """All 2k zeros of the characteristic polynomial for 0 < rho < 1.

    Pass ``one_minus_rho`` when it is known more accurately than ``1 - rho``
    (see :class:`erlangmax.params.DerivedParams`).
    """
    rho = float(rho)
    if not (0.0 < rho < 1.0):
        raise ValueError(f"rho must lie in (0, 1), got {rho!r}")
    if int(k) != k or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k!r}")
    k = int(k)
    d = 1.0 - rho if one_minus_rho is None else float(one_minus_rho)
    a = 0.5 * (1.0 + rho)

    u = unit_roots(k)
    omu = one_minus_unit_roots(k)
    disc = (0.5 * d) ** 2 + rho * omu
    r = np.sqrt(disc)  # principal branch; Re(disc) > 0 so Re(r) > 0
    r[0] = 0.5 * d

    sigma_plus = a + r
    sigma_plus[0] = 1.0
    # sigma^- sigma^+ = rho u; avoids a - r cancelling when rho is small
    sigma_minus = rho * u / sigma_plus
    sigma_minus[0] = rho
    one_minus_sigma = 0.5 * d + r
    one_minus_sigma[0] = d

    for arr in (u, omu, r, sigma_minus, sigma_plus, one_minus_sigma):
        arr.setflags(write=False)
    return SpectralData(
        k=k,
        rho=rho,
        one_minus_rho=d,
        unit_roots=u,
        one_minus_u=omu,
        sqrt_disc=r,
        sigma_minus=sigma_minus,
        sigma_plus=sigma_plus,
        one_minus_sigma=one_minus_sigma,
    )


def char_poly(sigma, k: int, rho: float):
    """P(sigma) = [sigma (1 + rho - sigma)]^k - rho^k."""
    return (sigma * (1.0 + rho - sigma)) ** k - rho**k


def product_form(sigma, spectral: SpectralData):
    """(-1)^k prod_l (sigma - sigma_l^-)(sigma - sigma_l^+), the factored P."""
    s = np.asarray(sigma, dtype=complex)[..., None]
    prod = np.prod((s - spectral.sigma_minus) * (s - spectral.sigma_plus), axis=-1)
    return (-1) ** spectral.k * prod


def unit_root_product(k: int) -> complex:
    """(1/k) prod_{j>=1} (1 - u_j), which equals 1; evaluated in the log domain."""
    if k == 1:
        return 1.0 + 0.0j
    logs = np.log(one_minus_unit_roots(k)[1:])
    total = complex(math.fsum(logs.real), math.fsum(logs.imag))
    return complex(np.exp(total)) / k
