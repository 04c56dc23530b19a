"""Environment state records: the serialization and replay-validation unit."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

STATE_FILE_VERSION = 1


@dataclass
class EnvState:
    """A restorable snapshot: benchmark, action history, reward, digest.

    Replaying ``actions`` from reset on the same benchmark must reproduce
    ``state_digest`` exactly (for deterministic backends) and
    ``cumulative_reward`` within 1e-9 (for deterministic reward spaces).
    """

    env_id: str
    benchmark: str
    reward_space_id: str
    actions: list[str] = field(default_factory=list)
    cumulative_reward: float = 0.0
    state_digest: str = ""

    def to_dict(self) -> dict:
        return {
            "version": STATE_FILE_VERSION,
            "env_id": self.env_id,
            "benchmark": self.benchmark,
            "reward_space_id": self.reward_space_id,
            "actions": list(self.actions),
            "cumulative_reward": self.cumulative_reward,
            "state_digest": self.state_digest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnvState":
        version = d.get("version", STATE_FILE_VERSION)
        if version != STATE_FILE_VERSION:
            raise ValueError(f"unsupported state file version {version}")
        return cls(
            env_id=d["env_id"],
            benchmark=d["benchmark"],
            reward_space_id=d.get("reward_space_id", ""),
            actions=list(d["actions"]),
            cumulative_reward=float(d["cumulative_reward"]),
            state_digest=d["state_digest"],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "EnvState":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
