"""Named invariant checks behind ``erlangmax verify``.

Each check returns a :class:`CheckResult` with the worst observed value, so a
failing run says which identity broke and by how much.  ``fault`` shifts rho
by 1e-3 in every derived parameter set, a negative control that must make
the suite fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import asym, exact, mc, spectral
from .params import SamplingParams, derive, omega_from_rho, rho_from_gamma

FAULT_SHIFT = 1e-3
# roundoff floor for bounds whose right-hand side can sit below binary64 resolution
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class Context:
    quick: bool = False
    fault: bool = False
    seed: int = 0

    def derive(self, params: SamplingParams):
        d = derive(params)
        if not self.fault:
            return d
        return replace(d, rho=d.rho + FAULT_SHIFT, one_minus_rho=d.one_minus_rho - FAULT_SHIFT)

    def law(self, params: SamplingParams):
        return exact.max_law(params, self.derive(params))

    def spectral(self, k: int, rho: float):
        d = self.derive(SamplingParams.from_rho(rho, k, 1.0))
        return spectral.roots(k, d.rho, d.one_minus_rho)


def _floor(k: int) -> float:
    return 64.0 * k * _EPS


def check_rho_definitions(ctx: Context) -> CheckResult:
    worst = 0.0
    omegas = np.logspace(-6, 9, 7 if ctx.quick else 31)
    ks = (1, 16, 4096) if ctx.quick else (1, 2, 7, 64, 512, 4096)
    for w in omegas:
        for k in ks:
            p = SamplingParams(1.0, float(w), k)
            d = ctx.derive(p)
            r17 = rho_from_gamma(d, p.beta)
            worst = max(worst, abs(r17 - d.rho) / d.rho)
            again = derive(SamplingParams(p.beta, omega_from_rho(d.rho, k, p.beta), k))
            worst = max(worst, abs(again.rho - d.rho) / d.rho)
    return CheckResult("rho_definitions", worst <= 1e-12, f"max relative mismatch {worst:.3g}")


def check_root_pairs(ctx: Context) -> CheckResult:
    # sigma^- + sigma^+ = 1 + rho, sigma^- sigma^+ = rho u, P(sigma) = 0, ordering
    worst, order_ok = 0.0, True
    for k in (8, 64) if ctx.quick else (1, 8, 64, 512):
        for rho in (0.3, 0.7, 0.99):
            sp = ctx.spectral(k, rho)
            worst = max(worst, float(np.max(np.abs(sp.sigma_minus + sp.sigma_plus - (1 + rho)))))
            worst = max(worst, float(np.max(np.abs(sp.sigma_minus * sp.sigma_plus - rho * sp.unit_roots))))
            if k <= 64:
                for s in (sp.sigma_minus, sp.sigma_plus):
                    res = np.abs(spectral.char_poly(s, k, rho))
                    worst = max(worst, float(np.max(res)) / k)
            a_m, a_p = np.abs(sp.sigma_minus[1:]), np.abs(sp.sigma_plus[1:])
            order_ok &= bool(np.all(a_m < sp.rho) and np.all(a_p > 1.0))
    ok = worst <= 1e-10 and order_ok
    return CheckResult("root_pairs", ok, f"max residual {worst:.3g}, ordering {'ok' if order_ok else 'broken'}")


def check_unit_root_product(ctx: Context) -> CheckResult:
    worst = max(abs(spectral.unit_root_product(k) - 1.0) for k in (2, 17, 256, 4096))
    return CheckResult("unit_root_product", worst <= 1e-10, f"max |prod - 1| {worst:.3g}")


def _coeff_grid(ctx: Context):
    ks = (8, 128, 512) if ctx.quick else (8, 32, 128, 512, 4096)
    return [(k, rho) for k in ks for rho in (0.5, 0.9, 0.99)]


def check_outer_exponent_bounds(ctx: Context) -> CheckResult:
    worst, worst_re = -math.inf, -math.inf
    for k, rho in _coeff_grid(ctx):
        d = ctx.derive(SamplingParams.from_rho(rho, k, 1.0))
        sp = ctx.spectral(k, rho)
        g = exact.coeffs_outer(sp).g
        bound = -0.5 * math.log(d.one_minus_tau_k)
        worst = max(worst, float(np.max(np.abs(g))) - bound - _floor(k))
        worst_re = max(worst_re, float(np.max(g.real)) - _floor(k))
    ok = worst < 0 and worst_re < 0
    return CheckResult(
        "outer_exponent_bounds", ok, f"max |g|-bound {worst:.3g}, max Re g {worst_re:.3g}"
    )


def _main_terms(sp):
    return sp.sigma_plus / (sp.k * sp.one_minus_sigma * 2.0 * sp.sqrt_disc)


def check_coefficient_bounds(ctx: Context) -> CheckResult:
    over, rel = -math.inf, -math.inf
    for k, rho in _coeff_grid(ctx):
        d = ctx.derive(SamplingParams.from_rho(rho, k, 1.0))
        sp = ctx.spectral(k, rho)
        c = exact.coeffs_outer(sp).c
        main = _main_terms(sp)
        ratio = np.abs(c) / np.abs(main)
        over = max(over, float(np.max(ratio)) - 1.0 - _floor(k))
        dev = np.abs(c / main - 1.0)
        rel = max(rel, float(np.max(dev)) - d.tau_k / d.one_minus_tau_k - _floor(k))
    ok = over <= 0 and rel <= 0
    return CheckResult("coefficient_bounds", ok, f"max |c/main|-1 {over:.3g}, max excess deviation {rel:.3g}")


def check_coefficient_decay(ctx: Context) -> CheckResult:
    worst = -math.inf
    for k, rho in _coeff_grid(ctx):
        sp = ctx.spectral(k, rho)
        c = exact.coeffs_outer(sp).c
        m = k // 2
        if m < 1:
            continue
        j = np.arange(1, m + 1)
        bound = sp.one_minus_rho * math.sqrt(k) / j * (1 + math.sqrt(2)) * math.sqrt(c[0].real)
        worst = max(worst, float(np.max(np.abs(c[1 : m + 1]) / bound)))
    return CheckResult("coefficient_decay", worst <= 1.0, f"max |c_j|/bound {worst:.3g}")


def check_representation_equivalence(ctx: Context) -> CheckResult:
    worst = 0.0
    for k in (1, 8, 64) if ctx.quick else (1, 2, 8, 17, 32, 64):
        for rho in (0.3, 0.6, 0.9, 0.99):
            sp = ctx.spectral(k, rho)
            a = exact.coeffs_direct(sp).c
            b = exact.coeffs_outer(sp).c
            worst = max(worst, float(np.max(np.abs(a - b)) / np.max(np.abs(b))))
            c0 = math.exp(2.0 * float(np.sum(np.log(np.abs(sp.one_minus_sigma[1:]))))) / k
            worst = max(worst, abs(b[0].real - c0) / c0)
    return CheckResult("representation_equivalence", worst <= 1e-8, f"max relative gap {worst:.3g}")


def check_expected_max(ctx: Context) -> CheckResult:
    worst, bad = 0.0, 0
    for w in (0.1, 2.0, 50.0, 1e4):
        p = SamplingParams(1.0, w, 1)
        v = exact.expected_max_from_law(ctx.law(p))
        worst = max(worst, abs(v - exact.expected_max_k1(1.0, w)) / v)
    for k in (1, 4, 64, 1024):
        for w in (0.5, 10.0, 1e3):
            p = SamplingParams(1.0, w, k)
            v = exact.expected_max_from_law(ctx.law(p))
            bad += not (0.0 < v < 0.5)
    ok = worst <= 1e-12 and bad == 0
    return CheckResult("expected_max", ok, f"k=1 closed-form gap {worst:.3g}, {bad} out-of-range values")


def check_tail_law(ctx: Context) -> CheckResult:
    p = SamplingParams(1.0, 10.0, 4)
    law = ctx.law(p)
    t = np.linspace(0.0, 5.0, 100)
    tail = exact.tail_prob(t, law)
    mono = bool(np.all(np.diff(tail) <= 1e-15))
    in_range = bool(0.0 < tail[0] < 1.0)
    # k = 1 reference (gamma1 / gamma2) exp(-2 beta t)
    p1 = SamplingParams(1.0, 2.0, 1)
    d1 = derive(p1)
    ref = d1.gamma1 / d1.gamma2 * np.exp(-2.0 * t)
    gap = float(np.max(np.abs(exact.tail_prob(t, ctx.law(p1)) - ref)))
    ok = mono and in_range and gap <= 1e-12
    return CheckResult("tail_law", ok, f"monotone={mono}, P(M>0)={tail[0]:.6g}, k=1 gap {gap:.3g}")


def check_integer_power_sums(ctx: Context) -> CheckResult:
    worst = 0.0
    for k in (7, 100, 2048) if ctx.quick else (2, 7, 100, 513, 1024, 2048):
        worst = max(worst, abs(asym.s_k_exact(k, 1.0) - (k - 1) / 2) / k)
        poly = -(k - 1) * (k - 5) / 12
        worst = max(worst, abs(asym.s_k_exact(k, 2.0) - poly) / max(1.0, abs(poly)))
        worst = max(worst, abs(asym.s_k_asym(k, 2.0).value - poly) / max(1.0, abs(poly)))
    return CheckResult("integer_power_sums", worst <= 1e-10, f"max relative gap {worst:.3g}")


ORDER_CASES = ((0.5, 1), (0.5, 2), (1.5, 1), (1.5, 2), (-0.5, 1), (-0.5, 2))
ORDER_KS = (64, 128, 256, 512, 1024)


def order_ratios(s: float, p: int, ks=ORDER_KS, dps: int = 40) -> list[float]:
    errs = [asym.s_k_exact(k, s, dps=dps) - asym.s_k_asym(k, s, p, dps=dps).value for k in ks]
    return asym.doubling_ratios(errs)


def check_expansion_orders(ctx: Context) -> CheckResult:
    lines, ok = [], True
    ks = ORDER_KS[:3] if ctx.quick else ORDER_KS
    for s, p in ORDER_CASES:
        target = 2.0 ** (2 * p + 1 - s)
        r = order_ratios(s, p, ks)
        good = all(0.5 * target <= x <= 2.0 * target for x in r)
        ok &= good
        lines.append(f"s={s},p={p}:{min(r) / target:.3f}..{max(r) / target:.3f}")
    return CheckResult("expansion_orders", ok, "ratio/target " + " ".join(lines))


def check_discretization_constant(ctx: Context) -> CheckResult:
    ks = (64, 128, 256, 512, 1024)
    scaled = [abs(asym.discretization_constant(k).second_order_residual) * k * k for k in ks]
    spread = max(scaled) / min(scaled)
    d1 = asym.discretization_constant(1).value
    dlarge = asym.discretization_constant(4096).value
    ok = spread <= 4 and d1 == 1 / math.sqrt(2) and abs(dlarge - 0.5826) < 1e-3
    return CheckResult("discretization_constant", ok, f"k^2 residual spread {spread:.3g}, D_4096={dlarge:.6f}")


def check_uniform_remainder(ctx: Context) -> CheckResult:
    ks = (1, 4, 16, 64, 256)
    lines, ok, prev = [], True, None
    for w in (1e2, 1e3, 1e4):
        rem = []
        for k in ks:
            p = SamplingParams(1.0, w, k)
            v = exact.expected_max_from_law(ctx.law(p))
            rem.append(abs(v - asym.expected_max_asym(p)) * w)
        spread = max(rem) / min(rem)
        ok &= spread <= 10
        if prev is not None:
            ok &= max(rem) <= 2.0 * prev
        prev = max(rem)
        lines.append(f"omega={w:g}:{min(rem):.3g}..{max(rem):.3g}")
    return CheckResult("uniform_remainder", ok, " ".join(lines))


def check_small_omega_bound(ctx: Context) -> CheckResult:
    lines, ok = [], True
    for k in (200, 400, 800):
        p = SamplingParams.from_rho(0.9, k, 1.0)
        law = ctx.law(p)
        rk = asym.r_k_direct(law.spectral, law.derived)
        b = asym.small_omega_bound(p)
        ok &= 0.0 <= rk <= b.Rk_bound
        lines.append(f"k={k}:R={rk:.3g}<= {b.Rk_bound:.3g}")
    return CheckResult("small_omega_bound", ok, " ".join(lines))


def check_monte_carlo(ctx: Context) -> CheckResult:
    paths = 50_000 if ctx.quick else 400_000
    p = SamplingParams(1.0, 2.0, 1)
    est = mc.estimate_max(p, mc.McConfig(paths, seed=ctx.seed))
    v = exact.expected_max_from_law(ctx.law(p))
    z = (v - est.mean) / est.stderr
    return CheckResult("monte_carlo", abs(z) < 4, f"exact {v:.6g}, mc {est.mean:.6g} +- {est.stderr:.2g}, z={z:.2f}")


ALL_CHECKS = (
    check_rho_definitions,
    check_root_pairs,
    check_unit_root_product,
    check_representation_equivalence,
    check_outer_exponent_bounds,
    check_coefficient_bounds,
    check_coefficient_decay,
    check_expected_max,
    check_tail_law,
    check_integer_power_sums,
    check_expansion_orders,
    check_discretization_constant,
    check_uniform_remainder,
    check_small_omega_bound,
    check_monte_carlo,
)


def run_all(quick: bool = False, fault: bool = False, seed: int = 0) -> list[CheckResult]:
    ctx = Context(quick=quick, fault=fault, seed=seed)
    out = []
    for fn in ALL_CHECKS:
        try:
            out.append(fn(ctx))
        except Exception as exc:  # a crash is a failed check, not a crashed report
            name = fn.__name__.removeprefix("check_")
            out.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return out
