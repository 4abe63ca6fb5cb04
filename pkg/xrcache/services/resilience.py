"""Retrying wrapper for convex solves with a solver fallback chain."""
import logging
import threading
from typing import Optional, Sequence, Tuple

import cvxpy as cp
from tenacity import (
    RetryError as TenacityRetryError,
    Retrying,
    retry_if_exception_type,
    stop_after_attempt,
    wait_fixed,
)

from ..config import Config
from ..errors import SolverError

logger = logging.getLogger(__name__)

# Statuses that end a solve; anything else is retried with the next solver.
SOLVED = ("optimal", "optimal_inaccurate")
INFEASIBLE = ("infeasible", "infeasible_inaccurate")


# ============================================================================
# Custom Exceptions
# ============================================================================

class SolveAttemptError(SolverError):
    """One solve attempt returned an unusable status or crashed."""

    def __init__(self, solver: Optional[str], status: str):
        self.solver = solver
        self.status = status
        super().__init__(f"solver {solver or 'default'} ended with status {status}")


class RetryExhaustedError(SolverError):
    """All solvers of the fallback chain failed."""

    def __init__(self, attempts: int, last_exception: Exception):
        self.attempts = attempts
        self.last_exception = last_exception
        super().__init__(f"Retry exhausted after {attempts} attempts: {last_exception}")


# ============================================================================
# Thread-safe Metrics Counter
# ============================================================================

class _ThreadSafeMetrics:
    """Thread-safe metrics counter."""

    def __init__(self):
        self._lock = threading.Lock()
        self._data = {
            "solves": 0,
            "infeasible": 0,
            "failures": 0,
            "retry_attempts_total": 0,
        }

    def increment(self, key: str, value: int = 1):
        with self._lock:
            self._data[key] += value

    def snapshot(self) -> dict:
        with self._lock:
            return self._data.copy()


# ============================================================================
# Solver Chain
# ============================================================================

class resilient_solve:
    """
    Solve cvxpy problems along a fallback chain of solvers.

    Usage:
        solve = resilient_solve(name="sca")
        status, attempts = solve.call(problem, warm_start=True)
    """

    def __init__(
        self,
        name: str = "cvxpy",
        solvers: Optional[Sequence[str]] = None,
        retry_attempts: Optional[int] = None,
        retry_wait: Optional[float] = None,
    ):
        self.name = name
        requested = list(solvers) if solvers else [Config.SOLVER, Config.FALLBACK_SOLVER]
        installed = set(cp.installed_solvers())
        chain = [s for s in requested if s in installed]
        if len(chain) != len(requested):
            logger.debug("Solvers %s not installed; chain is %s",
                         sorted(set(requested) - installed), chain or ["default"])
        self.solvers = chain or [None]
        self.retry_attempts = retry_attempts or max(Config.SOLVER_RETRIES, len(self.solvers))
        self.retry_wait = Config.SOLVER_RETRY_WAIT if retry_wait is None else retry_wait
        self._metrics = _ThreadSafeMetrics()

    def call(self, problem: cp.Problem, **solve_kwargs) -> Tuple[str, int]:
        """
        Solve ``problem`` in place.

        Returns: (status, attempts_used); status is one of SOLVED or INFEASIBLE.
        Raises:
            RetryExhaustedError: every attempt crashed or ended with an unusable status.
        """
        self._metrics.increment("solves")
        attempt = {"n": 0}

        def _attempt():
            solver = self.solvers[attempt["n"] % len(self.solvers)]
            attempt["n"] += 1
            try:
                problem.solve(solver=solver, **solve_kwargs)
            except cp.error.SolverError as exc:
                logger.debug("Solver %s crashed on %s: %s", solver, self.name, exc)
                raise SolveAttemptError(solver, "solver_error") from exc
            if problem.status not in SOLVED + INFEASIBLE:
                raise SolveAttemptError(solver, str(problem.status))
            return problem.status

        retryer = Retrying(
            retry=retry_if_exception_type(SolveAttemptError),
            wait=wait_fixed(self.retry_wait),
            stop=stop_after_attempt(self.retry_attempts),
            reraise=False,
        )
        try:
            status = retryer(_attempt)
        except TenacityRetryError as err:
            attempts = err.last_attempt.attempt_number
            self._metrics.increment("failures")
            self._metrics.increment("retry_attempts_total", attempts - 1)
            last_exc = err.last_attempt.exception()
            logger.warning("Solve '%s' failed after %d attempts: %s", self.name, attempts, last_exc)
            raise RetryExhaustedError(attempts, last_exc) from last_exc

        if attempt["n"] > 1:
            self._metrics.increment("retry_attempts_total", attempt["n"] - 1)
        if status in INFEASIBLE:
            self._metrics.increment("infeasible")
        return status, attempt["n"]

    def snapshot(self) -> dict:
        return {
            "name": self.name,
            "solvers": [s or "default" for s in self.solvers],
            "retry_attempts": self.retry_attempts,
            "metrics": self._metrics.snapshot(),
        }


_default_lock = threading.Lock()
_default_solver: Optional[resilient_solve] = None


def get_solver() -> resilient_solve:
    """Process-wide solver wrapper (double-checked singleton)."""
    global _default_solver
    if _default_solver is None:
        with _default_lock:
            if _default_solver is None:
                _default_solver = resilient_solve(name="cvxpy")
    return _default_solver
