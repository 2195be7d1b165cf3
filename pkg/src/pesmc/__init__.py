"""Global optimization by posterior-exploration sequential Monte Carlo."""

from .benchmarks import known_optimum, make_function
from .objective import Bounds, ObjectiveSpec, in_bounds, log_f
from .pe_smc import PeSmcConfig, RunResult, run
from .smc_sa import SmcSaConfig, run_smc_sa

__all__ = [
    "Bounds",
    "ObjectiveSpec",
    "PeSmcConfig",
    "RunResult",
    "SmcSaConfig",
    "in_bounds",
    "known_optimum",
    "log_f",
    "make_function",
    "run",
    "run_smc_sa",
]

__version__ = "0.1.0"
