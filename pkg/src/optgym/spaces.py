"""Self-describing space metadata exchanged between backends and clients.

A space describes the shape of one of three things: the actions an
environment accepts, the observations it can produce, or the scalar reward
signals it can compute. Descriptors are plain data so they serialize over
the wire protocol unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class SpaceKind:
    DISCRETE = "discrete"
    INTEGER_BOX = "integer-box"
    SCALAR_RANGE = "scalar-range"
    BYTE_STRING = "byte-string"
    UTF8_STRING = "utf8-string"
    INT64_VECTOR = "int64-vector"
    COMPOSITE = "composite"


@dataclass
class SpaceDescriptor:
    """Metadata for one action, observation, or reward space.

    The fields used depend on ``kind``:

    * ``discrete``: ``n`` (number of choices), optional ``names``.
    * ``integer-box``: ``lower`` and ``upper`` per-dimension bounds.
    * ``scalar-range``: ``lo``/``hi`` plus the ``deterministic`` and
      ``platform_dependent`` flags.
    * ``int64-vector``: ``length``.
    * ``composite``: ``parts`` (nested descriptors).
    * ``byte-string`` / ``utf8-string``: no extra fields.
    """

    id: str
    kind: str
    display_name: str = ""
    n: int | None = None
    names: list[str] | None = None
    lower: list[int] | None = None
    upper: list[int] | None = None
    lo: float | None = None
    hi: float | None = None
    deterministic: bool = True
    platform_dependent: bool = False
    length: int | None = None
    parts: list["SpaceDescriptor"] = field(default_factory=list)

    def __post_init__(self):
        if not self.id:
            raise ValueError("space id must be non-empty")
        if self.kind == SpaceKind.DISCRETE:
            if self.n is None or self.n < 1:
                raise ValueError(f"discrete space {self.id!r} needs n >= 1")
            if self.names is not None and len(self.names) != self.n:
                raise ValueError(f"discrete space {self.id!r}: names/n mismatch")
        elif self.kind == SpaceKind.INTEGER_BOX:
            if self.lower is None or self.upper is None:
                raise ValueError(f"integer-box space {self.id!r} needs bounds")
            if len(self.lower) != len(self.upper):
                raise ValueError(f"integer-box space {self.id!r}: bound length mismatch")
            for i, (lo, hi) in enumerate(zip(self.lower, self.upper)):
                if lo > hi:
                    raise ValueError(f"integer-box space {self.id!r}: lower[{i}] > upper[{i}]")
        elif self.kind == SpaceKind.INT64_VECTOR:
            if self.length is None or self.length < 1:
                raise ValueError(f"int64-vector space {self.id!r} needs length >= 1")
        elif self.kind == SpaceKind.COMPOSITE:
            if not self.parts:
                raise ValueError(f"composite space {self.id!r} needs parts")
        elif self.kind not in (SpaceKind.SCALAR_RANGE, SpaceKind.BYTE_STRING, SpaceKind.UTF8_STRING):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if not self.display_name:
            self.display_name = self.id

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"id": self.id, "kind": self.kind, "display_name": self.display_name}
        if self.kind == SpaceKind.DISCRETE:
            d["n"] = self.n
            if self.names is not None:
                d["names"] = list(self.names)
        elif self.kind == SpaceKind.INTEGER_BOX:
            d["lower"] = list(self.lower or [])
            d["upper"] = list(self.upper or [])
        elif self.kind == SpaceKind.SCALAR_RANGE:
            d["lo"] = self.lo
            d["hi"] = self.hi
            d["deterministic"] = self.deterministic
            d["platform_dependent"] = self.platform_dependent
        elif self.kind == SpaceKind.INT64_VECTOR:
            d["length"] = self.length
        elif self.kind == SpaceKind.COMPOSITE:
            d["parts"] = [p.to_dict() for p in self.parts]
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SpaceDescriptor":
        kw = dict(d)
        parts = [cls.from_dict(p) for p in kw.pop("parts", [])]
        return cls(parts=parts, **kw)


def check_unique_ids(descriptors: list[SpaceDescriptor]) -> None:
    """Space ids must be unique within one list of descriptors."""
    seen = set()
    for d in descriptors:
        if d.id in seen:
            raise ValueError(f"duplicate space id {d.id!r}")
        seen.add(d.id)
