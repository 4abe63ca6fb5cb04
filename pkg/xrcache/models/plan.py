from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, Tuple

from .placement import SubfileId


class DeliveryMode(str, Enum):
    MULTICAST = "multicast"
    PHANTOM_MULTICAST = "phantom-multicast"
    UNICAST = "unicast"
    TOPUP_UNICAST = "topup-unicast"


@dataclass(frozen=True)
class UserDemand:
    user: int
    state: int
    gain: Fraction
    missing: Fraction

    def to_dict(self):
        return {"user": self.user, "state": self.state, "gain": str(self.gain), "missing": str(self.missing)}


@dataclass(frozen=True)
class SegmentId:
    """Chunk ``index`` out of ``count`` equal chunks of a subfile."""

    parent: SubfileId
    index: int
    count: int

    @property
    def size(self) -> Fraction:
        return self.parent.size / self.count

    @property
    def interval(self) -> Tuple[Fraction, Fraction]:
        return Fraction(self.index, self.count), Fraction(self.index + 1, self.count)

    def label(self) -> str:
        if self.count == 1:
            return self.parent.label()
        return f"{self.parent.label()}#{self.index + 1}/{self.count}"

    def to_dict(self):
        return {"parent": self.parent.to_dict(), "index": self.index, "count": self.count}

    @classmethod
    def from_dict(cls, data) -> "SegmentId":
        return cls(parent=SubfileId.from_dict(data["parent"]), index=int(data["index"]),
                   count=int(data["count"]))


@dataclass(frozen=True, eq=False)
class Codeword:
    """A nested codeword: one data term per receiver, decodable after cache cancellation."""

    targets: Tuple[int, ...]
    data: Dict[int, Tuple[SegmentId, ...]]

    @property
    def receivers(self) -> Tuple[int, ...]:
        return tuple(sorted(k for k, segments in self.data.items() if segments))

    def payload(self, user: int) -> Fraction:
        return sum((seg.size for seg in self.data.get(user, ())), Fraction(0))

    def to_dict(self):
        return {
            "targets": list(self.targets),
            "data": {
                str(k): [seg.to_dict() for seg in segments]
                for k, segments in sorted(self.data.items())
            },
        }

    @classmethod
    def from_dict(cls, data) -> "Codeword":
        return cls(
            targets=tuple(int(k) for k in data["targets"]),
            data={int(k): tuple(SegmentId.from_dict(s) for s in segs) for k, segs in data["data"].items()},
        )


@dataclass(frozen=True, eq=False)
class Transmission:
    serving: Tuple[int, ...]
    codewords: Tuple[Codeword, ...]
    mode: DeliveryMode

    @property
    def receivers(self) -> Tuple[int, ...]:
        return tuple(sorted({k for cw in self.codewords for k in cw.receivers}))

    def payloads(self) -> Dict[int, Fraction]:
        """Largest per-codeword payload of each receiver."""
        result: Dict[int, Fraction] = {}
        for cw in self.codewords:
            for k in cw.receivers:
                result[k] = max(result.get(k, Fraction(0)), cw.payload(k))
        return result

    def to_dict(self):
        return {
            "serving": list(self.serving),
            "mode": self.mode.value,
            "codewords": [cw.to_dict() for cw in self.codewords],
        }

    @classmethod
    def from_dict(cls, data) -> "Transmission":
        return cls(
            serving=tuple(int(k) for k in data["serving"]),
            codewords=tuple(Codeword.from_dict(cw) for cw in data["codewords"]),
            mode=DeliveryMode(data["mode"]),
        )


@dataclass(frozen=True, eq=False)
class TransmissionPlan:
    user_count: int
    alpha: int
    common_gain: int
    transmissions: Tuple[Transmission, ...] = ()
    phantom_users: FrozenSet[int] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.transmissions)

    def __add__(self, other: "TransmissionPlan") -> "TransmissionPlan":
        return TransmissionPlan(
            user_count=self.user_count,
            alpha=self.alpha,
            common_gain=self.common_gain,
            transmissions=self.transmissions + other.transmissions,
            phantom_users=self.phantom_users | other.phantom_users,
        )

    @property
    def modes(self) -> FrozenSet[DeliveryMode]:
        return frozenset(t.mode for t in self.transmissions)

    def segments(self) -> Iterator[Tuple[int, SegmentId]]:
        """(receiver, segment) pairs in plan order."""
        for transmission in self.transmissions:
            for cw in transmission.codewords:
                for k in sorted(cw.data):
                    for seg in cw.data[k]:
                        yield k, seg

    def to_dict(self):
        return {
            "user_count": self.user_count,
            "alpha": self.alpha,
            "common_gain": self.common_gain,
            "phantom_users": sorted(self.phantom_users),
            "transmissions": [t.to_dict() for t in self.transmissions],
        }

    @classmethod
    def from_dict(cls, data) -> "TransmissionPlan":
        return cls(
            user_count=int(data["user_count"]),
            alpha=int(data["alpha"]),
            common_gain=int(data["common_gain"]),
            transmissions=tuple(Transmission.from_dict(t) for t in data["transmissions"]),
            phantom_users=frozenset(int(k) for k in data["phantom_users"]),
        )


@dataclass(frozen=True, eq=False)
class CompletenessReport:
    delivered: Tuple[Fraction, ...]
    required: Tuple[Fraction, ...]
    residuals: Dict[int, Tuple[SegmentId, ...]]

    @property
    def complete(self) -> bool:
        return not any(self.residuals.values())

    def to_dict(self):
        return {
            "delivered": [str(x) for x in self.delivered],
            "required": [str(x) for x in self.required],
            "residuals": {str(k): [s.label() for s in v] for k, v in self.residuals.items() if v},
        }
