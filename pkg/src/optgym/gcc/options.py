"""The GCC optimization space: options, choice vectors, categorical actions.

Every option owns a contiguous range of choice integers. Choice 0 always
means "absent": the option contributes nothing to the command line. The
remaining choices enumerate, in order: the bare flag (if the option can
appear argument-less), its negation (if negatable), any enumerated
argument values, then the integer argument range.

Integer ranges without documented bounds are clamped to [0, 2**31 - 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

O_LEVEL = "o-level"
FLAG = "tristate-flag"
PARAM = "param"

UNBOUNDED_LO = 0
UNBOUNDED_HI = 2**31 - 1


@dataclass(frozen=True)
class Option:
    name: str
    kind: str
    values: tuple[str, ...] = ()
    bare: bool = False  # flags: may appear with no argument
    negatable: bool = False  # flags: -fno-<name> is a setting
    lo: int | None = None  # integer argument range
    hi: int | None = None

    @property
    def range_size(self) -> int:
        if self.lo is None or self.hi is None:
            return 0
        return self.hi - self.lo + 1

    @property
    def cardinality(self) -> int:
        """Number of admissible settings, including absent."""
        return 1 + int(self.bare) + int(self.negatable) + len(self.values) + self.range_size

    def render(self, choice: int) -> str | None:
        """Command-line token for one choice; None when absent."""
        if not 0 <= choice < self.cardinality:
            raise ValueError(f"{self.name}: choice {choice} out of range")
        if choice == 0:
            return None
        index = choice - 1
        if self.bare:
            if index == 0:
                return self.name
            index -= 1
        if self.negatable:
            if index == 0:
                return "-fno-" + self.name[2:]
            index -= 1
        if index < len(self.values):
            value = self.values[index]
            if self.kind == O_LEVEL:
                return value
            return self._with_value(value)
        return self._with_value(str(self.lo + (index - len(self.values))))

    def _with_value(self, value: str) -> str:
        if self.kind == PARAM:
            return f"--param={self.name}={value}"
        return f"{self.name}={value}"

    def parse(self, token: str) -> int | None:
        """Inverse of render; None when the token does not belong here."""
        index_base = 1
        if self.bare:
            if token == self.name:
                return index_base
            index_base += 1
        if self.negatable:
            if token == "-fno-" + self.name[2:]:
                return index_base
            index_base += 1
        if self.kind == O_LEVEL:
            if token in self.values:
                return index_base + self.values.index(token)
            return None
        prefix = f"--param={self.name}=" if self.kind == PARAM else f"{self.name}="
        if not token.startswith(prefix):
            return None
        value = token[len(prefix) :]
        if value in self.values:
            return index_base + self.values.index(value)
        if self.range_size:
            try:
                number = int(value)
            except ValueError:
                return None
            if self.lo <= number <= self.hi:
                return index_base + len(self.values) + (number - self.lo)
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "kind": self.kind,
            "values": list(self.values),
            "bare": self.bare,
            "negatable": self.negatable,
            "lo": self.lo,
            "hi": self.hi,
            "cardinality": self.cardinality,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Option":
        return cls(
            name=d["name"],
            kind=d["kind"],
            values=tuple(d.get("values", ())),
            bare=d.get("bare", False),
            negatable=d.get("negatable", False),
            lo=d.get("lo"),
            hi=d.get("hi"),
        )


@dataclass
class GccSpec:
    compiler: str
    version: str
    options: tuple[Option, ...]

    @property
    def cardinalities(self) -> list[int]:
        return [o.cardinality for o in self.options]

    def default_vector(self) -> list[int]:
        return [0] * len(self.options)

    def to_dict(self) -> dict:
        return {
            "compiler": self.compiler,
            "version": self.version,
            "options": [o.to_dict() for o in self.options],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GccSpec":
        return cls(
            compiler=d["compiler"],
            version=d["version"],
            options=tuple(Option.from_dict(o) for o in d["options"]),
        )


def space_size_log10(spec: GccSpec) -> float:
    return sum(math.log10(o.cardinality) for o in spec.options)


def render_command_line(spec: GccSpec, choices: list[int]) -> list[str]:
    if len(choices) != len(spec.options):
        raise ValueError(f"choice vector length {len(choices)} != {len(spec.options)} options")
    out = []
    for option, choice in zip(spec.options, choices):
        token = option.render(choice)
        if token is not None:
            out.append(token)
    return out


def parse_command_line(spec: GccSpec, tokens: list[str]) -> list[int]:
    choices = spec.default_vector()
    for token in tokens:
        for i, option in enumerate(spec.options):
            parsed = option.parse(token)
            if parsed is not None:
                choices[i] = parsed
                break
        else:
            raise ValueError(f"token {token!r} matches no option")
    return choices


DIRECT_SET_THRESHOLD = 10
DELTAS = (1, -1, 10, -10, 100, -100, 1000, -1000)


@dataclass(frozen=True)
class CategoricalAction:
    """Either set one option's choice directly or nudge it by a delta."""

    name: str
    option_index: int
    set_to: int | None = None
    delta: int | None = None


def categorical_actions(spec: GccSpec) -> list[CategoricalAction]:
    """The flat action list: direct setters for small options, +-1/10/100/1000
    deltas for the rest."""
    actions: list[CategoricalAction] = []
    for i, option in enumerate(spec.options):
        if option.cardinality < DIRECT_SET_THRESHOLD:
            for k in range(option.cardinality):
                label = option.render(k) or "absent"
                actions.append(
                    CategoricalAction(name=f"{option.name}[{label}]", option_index=i, set_to=k)
                )
        else:
            for delta in DELTAS:
                actions.append(
                    CategoricalAction(name=f"{option.name}{delta:+d}", option_index=i, delta=delta)
                )
    return actions


def apply_categorical_action(
    spec: GccSpec, choices: list[int], action: CategoricalAction
) -> list[int]:
    out = list(choices)
    cardinality = spec.options[action.option_index].cardinality
    if action.set_to is not None:
        out[action.option_index] = action.set_to
    else:
        out[action.option_index] = min(max(out[action.option_index] + action.delta, 0), cardinality - 1)
    return out
