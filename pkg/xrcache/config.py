import logging
import os
from typing import Callable, TypeVar

logger = logging.getLogger(__name__)

Number = TypeVar("Number", int, float)


def _env_number(name: str, default: Number, cast: Callable[[str], Number], min_value: Number) -> Number:
    """Read XRCACHE_* knobs; malformed or out-of-range values fall back to the default with a warning."""
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        value = cast(raw)
    except ValueError:
        logger.warning("%s=%r is not a valid %s; keeping %s", name, raw, cast.__name__, default)
        return default
    if value < min_value:
        logger.warning("%s=%s is below %s; keeping %s", name, value, min_value, default)
        return default
    return value


def _env_int(name: str, default: int, min_value: int = 1) -> int:
    return _env_number(name, default, int, min_value)


def _env_float(name: str, default: float, min_value: float = 0.0) -> float:
    return _env_number(name, default, float, min_value)


class Config:

    VERSION = "0.3.0"

    LOG_LEVEL = os.getenv("XRCACHE_LOG_LEVEL", "INFO")
    OUTPUT_DIR = os.getenv("XRCACHE_OUTPUT_DIR", "results")
    THREADS = _env_int("XRCACHE_THREADS", 1, 1)

    # convex solvers, tried in order
    SOLVER = os.getenv("XRCACHE_SOLVER", "CLARABEL")
    FALLBACK_SOLVER = os.getenv("XRCACHE_FALLBACK_SOLVER", "SCS")
    SOLVER_RETRIES = _env_int("XRCACHE_SOLVER_RETRIES", 2, 1)
    SOLVER_RETRY_WAIT = _env_float("XRCACHE_SOLVER_RETRY_WAIT", 0.0, 0.0)

    RATE_SAMPLES = _env_int("XRCACHE_RATE_SAMPLES", 1000, 1)
    LOCAL_FIRST_FACTOR = _env_float("XRCACHE_LOCAL_FIRST_FACTOR", 1e6, 1.0)

    # SCA defaults
    SCA_MAX_ITERS = _env_int("XRCACHE_SCA_MAX_ITERS", 30, 1)
    SCA_TOL = _env_float("XRCACHE_SCA_TOL", 1e-4, 0.0)
    SCA_INNER_TOL = _env_float("XRCACHE_SCA_INNER_TOL", 1e-6, 0.0)

    # snapping tolerance for caching gains and their rational denominator cap
    GAIN_SNAP_TOL = 1e-9
    GAIN_MAX_DENOMINATOR = 10**6
