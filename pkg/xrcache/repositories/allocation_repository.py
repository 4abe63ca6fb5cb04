from typing import Optional

import numpy as np

from ..models.allocation import MemoryAllocation
from .base import CsvRepository


class AllocationRepository(CsvRepository):
    columns = ("state_index", "m", "t")

    def save(self, allocation: MemoryAllocation, path: str, meta: Optional[dict] = None) -> str:
        meta = dict(meta or {})
        meta.setdefault("allocation", {
            "user_count": allocation.user_count,
            "tradeoff": allocation.tradeoff,
            "gamma": allocation.gamma,
        })
        rows = (
            {"state_index": s, "m": repr(float(m)), "t": repr(float(t))}
            for s, (m, t) in enumerate(zip(allocation.fractions, allocation.gains))
        )
        return self.write_rows(rows, path, meta)

    def load(self, path: str) -> MemoryAllocation:
        rows = self.read_rows(path)
        info = self.read_meta(path).get("allocation", {})
        fractions = np.array([float(row["m"]) for row in rows])
        user_count = int(info.get("user_count") or round(float(rows[0]["t"]) / fractions[0]))
        return MemoryAllocation(
            fractions=fractions,
            user_count=user_count,
            tradeoff=float(info.get("tradeoff", np.inf)),
            gamma=float(info.get("gamma", np.nan)),
        )
