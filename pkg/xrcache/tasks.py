"""Drop work items and the worker pool that executes them."""
import concurrent.futures
import logging
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .config import Config
from .models.reports import DeliveryReport
from .models.scenario import Scenario
from .services.experiments import ScenarioContext, run_drop

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DropTask:
    index: int
    scheme: str
    seed: int


def run_task(scenario: Scenario, task: DropTask, context: Optional[ScenarioContext] = None) -> DeliveryReport:
    return run_drop(scenario, task.scheme, task.seed, context)


def run_drops(
    scenario: Scenario,
    schemes: Sequence[str],
    seeds: Sequence[int],
    threads: Optional[int] = None,
    context: Optional[ScenarioContext] = None,
) -> List[DeliveryReport]:
    """
    Run every (seed, scheme) pair; results come back ordered by drop index, then scheme order.

    The first failing drop cancels the pending ones and its DropError propagates.
    """
    tasks = [DropTask(index, scheme, seed) for index, seed in enumerate(seeds) for scheme in schemes]
    workers = max(1, min(threads or Config.THREADS, len(tasks) or 1))
    t0 = time.time()
    results = {}
    if workers == 1:
        for task in tasks:
            results[task] = run_task(scenario, task, context)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(run_task, scenario, task, context): task for task in tasks}
            try:
                for future in concurrent.futures.as_completed(futures):
                    results[futures[future]] = future.result()
            except Exception:
                for future in futures:
                    future.cancel()
                raise
    order = {scheme: position for position, scheme in enumerate(schemes)}
    reports = [results[task] for task in sorted(tasks, key=lambda t: (t.index, order[t.scheme]))]
    censored = sum(1 for r in reports if r.censored)
    logger.info("%d drops done in %.2fs with %d workers (%d censored)", len(reports), time.time() - t0,
                workers, censored)
    return reports
