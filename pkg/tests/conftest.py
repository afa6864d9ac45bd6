import time

import pytest

from erlangmax import mc
from erlangmax.params import SamplingParams

# wall-clock seconds spent building session fixtures, for runtime budgets
FIXTURE_SECONDS = {}


@pytest.fixture(scope="session")
def maxima_k4():
    """One million simulated maxima at beta=1, omega=10, k=4, shared across files."""
    t0 = time.perf_counter()
    p = SamplingParams(1.0, 10.0, 4)
    cfg = mc.McConfig(paths=1_000_000, seed=1)
    maxima, truncated = mc.simulate_maxima(p, cfg)
    FIXTURE_SECONDS["maxima_k4"] = time.perf_counter() - t0
    return p, cfg, maxima, truncated


@pytest.fixture
def report(capsys):
    """Print one line straight to the terminal, bypassing capture."""

    def emit(line):
        with capsys.disabled():
            print("\n" + line)

    return emit
