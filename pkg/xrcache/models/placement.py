from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Tuple


class Part(str, Enum):
    """Which piece of a state file a subfile belongs to."""

    WHOLE = "whole"
    PART1 = "part1"  # lower integer gain of a memory-shared file
    PART2 = "part2"  # upper integer gain


@dataclass(frozen=True)
class SubfileId:
    state: int
    part: Part
    subset: Tuple[int, ...]
    size: Fraction

    @property
    def gain(self) -> int:
        return len(self.subset)

    def sort_key(self):
        return (self.state, self.part.value, len(self.subset), self.subset)

    def label(self) -> str:
        users = ",".join(str(k) for k in self.subset)
        suffix = "" if self.part == Part.WHOLE else f"/{self.part.value}"
        return f"W{self.state}[{users}]{suffix}"

    def to_dict(self):
        return {
            "state": self.state,
            "part": self.part.value,
            "subset": list(self.subset),
            "size": str(self.size),
        }

    @classmethod
    def from_dict(cls, data) -> "SubfileId":
        return cls(
            state=int(data["state"]),
            part=Part(data["part"]),
            subset=tuple(int(k) for k in data["subset"]),
            size=Fraction(data["size"]),
        )


@dataclass(frozen=True, eq=False)
class CacheLayout:
    """Subfile inventory of every placed state; user k stores a subfile iff k is in its subset."""

    user_count: int
    gains: Dict[int, Fraction]
    inventory: Dict[int, Tuple[SubfileId, ...]]
    _stores: Dict[int, FrozenSet[SubfileId]] = field(default_factory=dict, repr=False, init=False)

    def __post_init__(self):
        stores = {k: [] for k in range(self.user_count)}
        for subfiles in self.inventory.values():
            for subfile in subfiles:
                for k in subfile.subset:
                    stores[k].append(subfile)
        self._stores.update({k: frozenset(v) for k, v in stores.items()})

    @property
    def states(self) -> Tuple[int, ...]:
        return tuple(sorted(self.inventory))

    def stored(self, user: int) -> FrozenSet[SubfileId]:
        return self._stores[user]

    def used_memory(self, user: int) -> Fraction:
        return sum((subfile.size for subfile in self._stores[user]), Fraction(0))

    def to_dict(self):
        return {
            "user_count": self.user_count,
            "states": [
                {
                    "state": s,
                    "gain": str(self.gains[s]),
                    "subfiles": [subfile.to_dict() for subfile in self.inventory[s]],
                }
                for s in self.states
            ],
            "users": [
                {
                    "user": k,
                    "stored": [sub.label() for sub in sorted(self._stores[k], key=SubfileId.sort_key)],
                    "used_memory": str(self.used_memory(k)),
                }
                for k in range(self.user_count)
            ],
        }
