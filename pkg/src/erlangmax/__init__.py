"""Expected all-time maximum of a drifted Brownian motion observed at Erlang epochs."""

from .asym import discretization_constant, expected_max_asym, s_k_asym, s_k_exact
from .exact import expected_max, expected_max_k1, max_law, tail_prob
from .mc import McConfig, McEstimate, estimate_max, estimate_tail
from .params import DerivedParams, SamplingParams, derive, omega_from_rho

__all__ = [
    "SamplingParams",
    "DerivedParams",
    "derive",
    "omega_from_rho",
    "expected_max",
    "expected_max_k1",
    "max_law",
    "tail_prob",
    "expected_max_asym",
    "discretization_constant",
    "s_k_exact",
    "s_k_asym",
    "McConfig",
    "McEstimate",
    "estimate_max",
    "estimate_tail",
]

__version__ = "0.1.0"
