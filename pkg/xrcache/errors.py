"""Exception hierarchy shared by the library and the command line."""
from typing import Any, Dict, Optional

# Exit codes of the command-line contract.
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class XRCacheError(Exception):
    """Base exception for every failure raised by xrcache."""

    category = "runtime"
    exit_code = EXIT_RUNTIME


class ConfigurationError(XRCacheError):
    """Invalid configuration or infeasible problem input."""

    category = "config"
    exit_code = EXIT_CONFIG

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class DomainError(XRCacheError):
    """A value lies outside the domain of the model (index, distance, gain)."""

    category = "domain"


class ScheduleError(XRCacheError):
    """The requested delivery schedule cannot be built."""

    category = "schedule"

    def __init__(self, common_gain: int, alpha: int, user_count: int):
        self.common_gain = common_gain
        self.alpha = alpha
        self.user_count = user_count
        super().__init__(
            f"common gain {common_gain} + alpha {alpha} exceeds {user_count} users; "
            "use the phantom or unicast delivery path"
        )


class PlanInvariantError(XRCacheError):
    """A transmission plan violates a bookkeeping invariant."""

    category = "plan"


class SolverError(XRCacheError):
    """The inner convex solver failed; carries the iterate that was being refined."""

    category = "solver"

    def __init__(self, message: str, iterate: Optional[Dict[str, Any]] = None):
        self.iterate = iterate or {}
        super().__init__(message)


class UnboundedTimeError(XRCacheError):
    """A user with a positive payload was assigned a zero rate."""

    category = "unbounded"

    def __init__(self, user: int, payload: float):
        self.user = user
        self.payload = payload
        super().__init__(f"user {user} has payload {payload} but zero rate")


class DropError(XRCacheError):
    """Failure of one Monte Carlo drop, wrapped with its context."""

    category = "drop"

    def __init__(self, scheme: str, seed: int, cause: Exception):
        self.scheme = scheme
        self.seed = seed
        self.cause = cause
        super().__init__(f"drop failed (scheme={scheme}, seed={seed}): {cause}")
