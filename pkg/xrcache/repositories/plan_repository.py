import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from ..errors import ConfigurationError, PlanInvariantError
from ..models.plan import TransmissionPlan
from ..services.delivery import plan_hash
from .base import JsonRepository

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StoredPlan:
    plan: TransmissionPlan
    plan_hash: str
    context: Dict[str, Any] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)


class PlanRepository(JsonRepository):
    """Plan JSON carrying its sha256 hash and the drop context needed to re-solve it."""

    def save(self, plan: TransmissionPlan, path: str, meta: Optional[dict] = None,
             context: Optional[dict] = None) -> str:
        body = {
            "plan_hash": plan_hash(plan),
            "context": context or {},
            "plan": plan.to_dict(),
        }
        return self.write_document(body, path, meta)

    def load(self, path: str) -> StoredPlan:
        """
        Raises:
            ConfigurationError: the file cannot be read or parsed.
            PlanInvariantError: the stored hash does not match the plan body.
        """
        try:
            document = self.read_document(path)
            plan = TransmissionPlan.from_dict(document["plan"])
        except (OSError, ValueError, KeyError) as err:
            raise ConfigurationError(f"cannot load plan {path}: {err}", field="plan") from err
        digest = plan_hash(plan)
        stored = document.get("plan_hash")
        if stored and stored != digest:
            raise PlanInvariantError(f"plan hash mismatch in {path}: stored {stored}, computed {digest}")
        logger.debug("Loaded plan %s (%d transmissions)", digest[:12], len(plan))
        return StoredPlan(plan=plan, plan_hash=digest, context=document.get("context", {}),
                          meta=document.get("meta", {}))
