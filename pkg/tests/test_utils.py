import cvxpy as cp
import pytest

from xrcache.services.resilience import RetryExhaustedError, get_solver, resilient_solve
from xrcache.utils import cache


def test_get_or_compute_runs_the_factory_once():
    calls = []

    def factory():
        calls.append(1)
        return 42

    assert cache.get_or_compute(cache._make_key("rates", 3), factory) == 42
    assert cache.get_or_compute("rates:3", factory) == 42
    assert len(calls) == 1
    assert cache.stats() == {"hits": 1, "misses": 1, "entries": 1}
    cache.clear()
    assert cache.stats()["entries"] == 0


def _lp(lower):
    x = cp.Variable()
    return cp.Problem(cp.Minimize(x), [x >= lower, x <= 2]), x


def test_solver_chain_reports_optimal_and_infeasible():
    solver = resilient_solve(name="lp", retry_wait=0)
    problem, x = _lp(1.0)
    status, attempts = solver.call(problem)
    assert status == "optimal" and attempts == 1
    assert x.value == pytest.approx(1.0, abs=1e-6)
    status, _ = solver.call(_lp(3.0)[0])
    assert status.startswith("infeasible")
    assert solver.snapshot()["metrics"]["infeasible"] == 1


def test_unknown_solvers_fall_back_to_the_default():
    solver = resilient_solve(solvers=["NOT_A_SOLVER"], retry_wait=0)
    assert solver.solvers == [None]
    assert get_solver() is get_solver()


def test_crashing_solver_exhausts_the_chain(monkeypatch):
    problem, _ = _lp(1.0)

    def crash(*args, **kwargs):
        raise cp.error.SolverError("numerical trouble")

    monkeypatch.setattr(problem, "solve", crash)
    solver = resilient_solve(name="lp", retry_attempts=3, retry_wait=0)
    with pytest.raises(RetryExhaustedError) as err:
        solver.call(problem)
    assert err.value.attempts == 3
    metrics = solver.snapshot()["metrics"]
    assert metrics["failures"] == 1 and metrics["retry_attempts_total"] == 2
