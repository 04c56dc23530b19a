"""Service runtime tunables."""

from __future__ import annotations

import os
from dataclasses import dataclass, field


@dataclass
class ServiceConfig:
    per_call_timeout: float = 300.0
    start_timeout: float = 60.0
    max_retries: int = 1
    session_cap: int = 64
    cache_capacity: int = 128
    # Extra client-side allowance on top of the backend's own budget.
    grace: float = 10.0

    def __post_init__(self):
        for name in ("per_call_timeout", "start_timeout", "grace"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("max_retries", "session_cap", "cache_capacity"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @classmethod
    def default(cls) -> "ServiceConfig":
        cfg = cls()
        override = os.environ.get("OPTGYM_SERVICE_TIMEOUT")
        if override:
            cfg.per_call_timeout = float(override)
        return cfg
