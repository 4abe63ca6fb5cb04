from fractions import Fraction
from typing import Optional

from ..models.placement import CacheLayout
from ..services.placement import place_gains
from .base import JsonRepository


class LayoutRepository(JsonRepository):
    def save(self, layout: CacheLayout, path: str, meta: Optional[dict] = None) -> str:
        return self.write_document({"layout": layout.to_dict()}, path, meta)

    def load(self, path: str) -> CacheLayout:
        # gains are stored exactly, so re-placing reproduces the inventory
        layout = self.read_document(path)["layout"]
        gains = {int(entry["state"]): Fraction(entry["gain"]) for entry in layout["states"]}
        return place_gains(gains, int(layout["user_count"]))
