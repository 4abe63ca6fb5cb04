import logging
import threading
from typing import Any, Callable, Dict

logger = logging.getLogger(__name__)

_store: Dict[str, Any] = {}
_lock = threading.RLock()
_stats = {"hits": 0, "misses": 0}


def _make_key(prefix: str, *parts) -> str:
    if not parts:
        return prefix
    return prefix + ":" + ":".join(str(p) for p in parts)


def get_value(key: str) -> Any:
    with _lock:
        value = _store.get(key)
        _stats["hits" if value is not None else "misses"] += 1
    return value


def set_value(key: str, value: Any) -> None:
    with _lock:
        _store[key] = value


def clear() -> None:
    with _lock:
        _store.clear()
        _stats.update(hits=0, misses=0)


def stats() -> Dict[str, int]:
    with _lock:
        return dict(_stats, entries=len(_store))


def get_or_compute(key: str, factory: Callable[[], Any]) -> Any:
    """Cache-aside: return the cached value or compute, store and return it."""
    cached = get_value(key)
    if cached is not None:
        logger.debug("cache hit %s", key)
        return cached
    # computed under the lock so concurrent drops do not duplicate the work
    with _lock:
        cached = _store.get(key)
        if cached is not None:
            return cached
        logger.debug("cache miss %s", key)
        value = factory()
        _store[key] = value
        return value
