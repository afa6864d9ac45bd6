"""Monte Carlo oracle for the maximum of the Erlang-sampled walk.

Between two sampling epochs the drifted Brownian motion moves by
Erlang(k, gamma2) - Erlang(k, gamma1), so the sampled positions form a random
walk with that increment.  Each path is run until it has fallen ``margin``
below its running maximum; from there the continuous motion would need to
climb ``margin`` again, which happens with probability at most
exp(-2 beta margin).  With margin = safety * ln(1/margin_eps) / (2 beta) that
probability is margin_eps**safety, and the expected amount of maximum lost per
path is at most margin_eps / (2 beta).

Paths are simulated in fixed-size blocks.  Block b draws from its own stream
seeded by (seed, b), so results do not depend on how blocks are scheduled.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import TruncationExcess
from .params import DerivedParams, SamplingParams, derive

BLOCK_PATHS = 1 << 14
# Erlang draws are sums of exponentials up to this k, gamma variates above
SUM_MAX_K = 16
TRUNCATION_LIMIT = 1e-3
_CHUNK_ELEMS = 1 << 22


@dataclass(frozen=True)
class McConfig:
    paths: int
    seed: int = 0
    margin_eps: float = 1e-9
    max_steps: int = 10_000_000
    safety: float = 2.0

    def __post_init__(self):
        if int(self.paths) != self.paths or self.paths < 1:
            raise ValueError(f"paths must be an integer >= 1, got {self.paths!r}")
        if int(self.seed) != self.seed or not (0 <= self.seed < 2**64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not (0.0 < self.margin_eps < 1.0):
            raise ValueError(f"margin_eps must lie in (0, 1), got {self.margin_eps!r}")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise ValueError(f"max_steps must be an integer >= 1, got {self.max_steps!r}")
        if not self.safety >= 1.0:
            raise ValueError(f"safety must be >= 1, got {self.safety!r}")

    def margin(self, beta: float) -> float:
        return self.safety * math.log(1.0 / self.margin_eps) / (2.0 * beta)

    def bias_bound(self, beta: float) -> float:
        return self.margin_eps / (2.0 * beta)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    paths: int
    bias_bound: float
    truncated_paths: int


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64DXSM(np.random.SeedSequence([seed, block])))


def sample_erlang(rng: np.random.Generator, k: int, rate: float, shape) -> np.ndarray:
    """Erlang(k, rate) draws of the given shape."""
    if k > SUM_MAX_K:
        return rng.standard_gamma(k, shape) / rate
    acc = rng.standard_exponential(shape)
    if k > 1:
        buf = np.empty_like(acc)
        for _ in range(k - 1):
            rng.standard_exponential(out=buf)
            acc += buf
    acc /= rate
    return acc


def sample_increments(derived: DerivedParams, k: int, rng: np.random.Generator, size) -> np.ndarray:
    """Draws of Erlang(k, gamma2) - Erlang(k, gamma1)."""
    shape = (size,) if np.isscalar(size) else tuple(size)
    up = sample_erlang(rng, k, derived.gamma2, shape)
    down = sample_erlang(rng, k, derived.gamma1, shape)
    return up - down


def sample_increment(derived: DerivedParams, k: int, rng: np.random.Generator) -> float:
    return float(sample_increments(derived, k, rng, 1)[0])


def increment_moments(derived: DerivedParams, k: int) -> tuple[float, float]:
    """Mean -beta/omega and variance k (1/gamma1^2 + 1/gamma2^2) of one increment."""
    g1, g2 = derived.gamma1, derived.gamma2
    return k / g2 - k / g1, k * (1.0 / g1**2 + 1.0 / g2**2)


def _simulate_block(params, derived, cfg, n, block):
    rng = block_rng(cfg.seed, block)
    margin = cfg.margin(params.beta)
    mean, _ = increment_moments(derived, params.k)
    # a quarter of the steps needed to sink by margin; survivors get more rounds
    expect = margin / -mean
    out = np.empty(n)
    truncated = 0
    idx = np.arange(n)
    pos = np.zeros(n)
    top = np.zeros(n)
    steps = 0
    while idx.size:
        chunk = max(16, min(int(0.25 * expect), _CHUNK_ELEMS // idx.size))
        chunk = min(chunk, cfg.max_steps - steps)
        walk = sample_increments(derived, params.k, rng, (idx.size, chunk))
        np.cumsum(walk, axis=1, out=walk)
        walk += pos[:, None]
        run = np.maximum.accumulate(walk, axis=1)
        np.maximum(run, top[:, None], out=run)
        hit = (run - walk) >= margin
        done = hit.any(axis=1)
        out[idx[done]] = run[done, -1]
        steps += chunk
        keep = ~done
        pos = walk[keep, -1]
        top = run[keep, -1]
        idx = idx[keep]
        if steps >= cfg.max_steps and idx.size:
            out[idx] = top
            truncated = idx.size
            break
    return out, truncated


def _workers() -> int:
    raw = os.environ.get("ERLANGMAX_THREADS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def simulate_maxima(params: SamplingParams, cfg: McConfig) -> tuple[np.ndarray, int]:
    """Per-path maxima in path order, plus the number of truncated paths."""
    derived = derive(params)
    sizes = [BLOCK_PATHS] * (cfg.paths // BLOCK_PATHS)
    if cfg.paths % BLOCK_PATHS:
        sizes.append(cfg.paths % BLOCK_PATHS)
    jobs = [(params, derived, cfg, n, b) for b, n in enumerate(sizes)]
    workers = min(_workers(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda a: _simulate_block(*a), jobs))
    else:
        results = [_simulate_block(*a) for a in jobs]
    maxima = np.concatenate([r[0] for r in results])
    truncated = sum(r[1] for r in results)
    if truncated / cfg.paths > TRUNCATION_LIMIT:
        raise TruncationExcess(truncated, cfg.paths)
    return maxima, truncated


def estimate_max(params: SamplingParams, cfg: McConfig) -> McEstimate:
    maxima, truncated = simulate_maxima(params, cfg)
    return summarize(maxima, params, cfg, truncated)


def summarize(maxima: np.ndarray, params: SamplingParams, cfg: McConfig, truncated: int = 0) -> McEstimate:
    n = maxima.size
    sd = float(np.std(maxima, ddof=1)) if n > 1 else float("inf")
    return McEstimate(
        mean=float(np.mean(maxima)),
        stderr=sd / math.sqrt(n),
        paths=n,
        bias_bound=cfg.bias_bound(params.beta),
        truncated_paths=truncated,
    )


def empirical_tail(maxima: np.ndarray, t_grid) -> list[tuple[float, float]]:
    m = np.sort(maxima)
    t = np.asarray(t_grid, dtype=float)
    if np.any(t < 0):
        raise ValueError("t values must be >= 0")
    above = m.size - np.searchsorted(m, t, side="right")
    return [(float(ti), float(a) / m.size) for ti, a in zip(t, above)]


def estimate_tail(params: SamplingParams, t_grid, cfg: McConfig) -> list[tuple[float, float]]:
    """Empirical P(M > t) at each grid point."""
    if np.any(np.asarray(t_grid, dtype=float) < 0):
        raise ValueError("t values must be >= 0")
    maxima, _ = simulate_maxima(params, cfg)
    return empirical_tail(maxima, t_grid)


def lindley_mean(
    params: SamplingParams,
    chains: int = 2000,
    steps: int = 20000,
    burn_in: int | None = None,
    seed: int = 0,
) -> tuple[float, float]:
    """Mean of the stationary Lindley iterate W <- max(0, W + X).

    Runs independent chains from W = 0, averages each over time after
    burn-in, and returns (mean, stderr) across chains.
    """
    derived = derive(params)
    mean, var = increment_moments(derived, params.k)
    if burn_in is None:
        # relaxation scale var / mean^2, taken generously
        burn_in = int(20.0 * var / mean**2) + 100
    rng = block_rng(seed, 0)
    w = np.zeros(chains)
    acc = np.zeros(chains)
    per = max(1, _CHUNK_ELEMS // (chains * max(params.k, 1)))
    done = 0
    total = burn_in + steps
    while done < total:
        n = min(per, total - done)
        x = sample_increments(derived, params.k, rng, (n, chains))
        for row in x:
            np.maximum(w + row, 0.0, out=w)
            if done >= burn_in:
                acc += w
            done += 1
    avg = acc / steps
    return float(avg.mean()), float(avg.std(ddof=1) / math.sqrt(chains))
