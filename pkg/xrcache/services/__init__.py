"""Allocation, placement, delivery, beamforming and the Monte Carlo harness."""
from .resilience import RetryExhaustedError, get_solver, resilient_solve
from .allocation import allocate, uniform_allocation
from .placement import place
from .delivery import deliver, plan_hash, verify_completeness
from .beamforming import solve_beams
from .metrics import total_time
from .experiments import run_cdf_experiment, run_drop, run_sweep

__all__ = [
    "RetryExhaustedError",
    "get_solver",
    "resilient_solve",
    "allocate",
    "uniform_allocation",
    "place",
    "deliver",
    "plan_hash",
    "verify_completeness",
    "solve_beams",
    "total_time",
    "run_cdf_experiment",
    "run_drop",
    "run_sweep",
]
