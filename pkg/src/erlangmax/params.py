"""Parameter coordinates: (beta, omega, k) and the derived (rho, gamma1, gamma2, tau, eps).

The sampled walk is driven by three user-facing numbers: the drift ``beta``,
the sampling frequency ``omega`` and the Erlang phase count ``k``.  Everything
downstream is expressed in the load-like coordinate ``rho``, the unique root in
(0, 1) of

    k * omega * (1 - rho)**2 = 2 * beta**2 * rho.

All conversions here avoid subtracting nearly equal quantities, since the
interesting regime (omega large) drives ``rho`` to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class SamplingParams:
    """Drift, sampling frequency and Erlang phase count."""

    beta: float
    omega: float
    k: int

    def __post_init__(self):
        object.__setattr__(self, "beta", _check_positive("beta", self.beta))
        object.__setattr__(self, "omega", _check_positive("omega", self.omega))
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))

    @classmethod
    def from_rho(cls, rho: float, k: int, beta: float) -> "SamplingParams":
        return cls(beta=beta, omega=omega_from_rho(rho, k, beta), k=k)


@dataclass(frozen=True)
class DerivedParams:
    """Derived coordinates.

    ``one_minus_rho`` is stored separately from ``rho`` and is computed without
    cancellation; use it wherever a formula needs 1 - rho.
    """

    rho: float
    one_minus_rho: float
    gamma1: float
    gamma2: float
    k: int
    beta: float

    @cached_property
    def tau(self) -> float:
        # each form is accurate on its half; the product form can round above 1
        if self.rho < 0.5:
            return 4.0 * self.rho / (1.0 + self.rho) ** 2
        return 1.0 - self.one_minus_tau

    @cached_property
    def one_minus_tau(self) -> float:
        return (self.one_minus_rho / (1.0 + self.rho)) ** 2

    @cached_property
    def tau_k(self) -> float:
        """tau**k, evaluated as exp(k*log1p(-(1 - tau)))."""
        return math.exp(self.k * math.log1p(-self.one_minus_tau))

    @cached_property
    def one_minus_tau_k(self) -> float:
        return -math.expm1(self.k * math.log1p(-self.one_minus_tau))

    @cached_property
    def eps(self) -> float:
        d = self.one_minus_rho
        return 0.5 * d + 0.125 * d * d


def _rho_pair(c: float) -> tuple[float, float]:
    # roots of rho**2 - (2 + c) rho + 1 = 0 multiply to 1; take the small one
    root = math.sqrt(c * c + 4.0 * c)
    rho = 2.0 / (2.0 + c + root)
    one_minus = 2.0 * c / (c + root)
    return rho, one_minus


def derive(params: SamplingParams) -> DerivedParams:
    """Map (beta, omega, k) to the derived coordinates."""
    beta, omega, k = params.beta, params.omega, params.k
    c = 2.0 * beta * beta / (k * omega)
    rho, one_minus_rho = _rho_pair(c)
    root = math.sqrt(beta * beta + 2.0 * k * omega)
    gamma2 = beta + root
    gamma1 = 2.0 * k * omega / gamma2  # = -beta + root without cancellation
    assert 0.0 < rho < 1.0
    return DerivedParams(
        rho=rho,
        one_minus_rho=one_minus_rho,
        gamma1=gamma1,
        gamma2=gamma2,
        k=k,
        beta=beta,
    )


def rho_from_gamma(d: DerivedParams, beta: float) -> float:
    """rho = 1 - 2 beta / gamma2, the defining relation through the rates.

    Evaluated as gamma1 / gamma2 (gamma2 - 2 beta = gamma1), which keeps full
    relative accuracy when rho is small.
    """
    return d.gamma1 / d.gamma2


def omega_from_rho(rho: float, k: int, beta: float) -> float:
    rho = float(rho)
    if not (0.0 < rho < 1.0):
        raise ValueError(f"rho must lie in (0, 1), got {rho!r}")
    if int(k) != k or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k!r}")
    beta = _check_positive("beta", beta)
    return 2.0 * beta * beta * rho / (k * (1.0 - rho) ** 2)
