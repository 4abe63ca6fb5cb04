from typing import List, Optional, Sequence

from ..models.beams import BeamformerSolution
from .base import JsonRepository


class BeamRepository(JsonRepository):
    """Per-transmission beamformer summaries of one plan; silent transmissions are stored as null."""

    def save(self, solutions: Sequence[Optional[BeamformerSolution]], path: str, meta: Optional[dict] = None,
             plan_hash: str = "") -> str:
        body = {
            "plan_hash": plan_hash,
            "solutions": [None if s is None else s.to_dict() for s in solutions],
        }
        return self.write_document(body, path, meta)

    def load(self, path: str) -> List[Optional[dict]]:
        return self.read_document(path)["solutions"]
