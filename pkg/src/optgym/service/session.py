"""The backend-facing integration interface plus shared backend machinery.

A compiler is integrated by implementing CompilationSession (the per-
episode state machine) and a Backend (the factory that advertises spaces,
resolves benchmarks, and owns the parsed-benchmark cache). The service
runtime maps these onto the wire protocol; integrations never touch
sockets.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections import OrderedDict
from typing import Any

from optgym.spaces import SpaceDescriptor


class CompilationSession(ABC):
    """One live compilation episode.

    ``init`` is called exactly once, before any ``apply_action``.
    """

    @abstractmethod
    def get_action_spaces(self) -> list[SpaceDescriptor]: ...

    @abstractmethod
    def get_observation_spaces(self) -> list[SpaceDescriptor]: ...

    @abstractmethod
    def init(self, action_space_id: str, benchmark_uri: str, artifact: Any) -> None: ...

    @abstractmethod
    def apply_action(self, action) -> tuple[bool, bool]:
        """Apply one action; returns (end_of_episode, action_space_changed)."""

    @abstractmethod
    def set_observation(self, observation_space_id: str):
        """Compute and return the value of one observation space."""

    @abstractmethod
    def fork(self) -> "CompilationSession":
        """Deep-copy in-memory state without replaying the action history."""


class BenchmarkCache:
    """LRU cache of parsed benchmarks, keyed by (uri, content digest)."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._entries: OrderedDict[tuple[str, str], Any] = OrderedDict()
        self.hits = 0
        self.misses = 0

    def get(self, key: tuple[str, str]):
        if key in self._entries:
            self._entries.move_to_end(key)
            self.hits += 1
            return self._entries[key]
        self.misses += 1
        return None

    def put(self, key: tuple[str, str], value) -> None:
        self._entries[key] = value
        self._entries.move_to_end(key)
        while len(self._entries) > self.capacity:
            self._entries.popitem(last=False)

    def clear(self) -> None:
        self._entries.clear()

    def stats(self) -> dict:
        return {"hits": self.hits, "misses": self.misses, "entries": len(self._entries)}


class Backend(ABC):
    """Factory for sessions of one compiler integration."""

    name: str = ""

    def __init__(self, cache_capacity: int = 128, **options):
        self.cache = BenchmarkCache(cache_capacity)
        self.options = options

    @abstractmethod
    def action_spaces(self) -> list[SpaceDescriptor]: ...

    @abstractmethod
    def observation_spaces(self) -> list[SpaceDescriptor]: ...

    @abstractmethod
    def parse_benchmark(self, benchmark_uri: str, content: bytes | None):
        """Resolve a benchmark to the in-memory artifact sessions start from."""

    @abstractmethod
    def new_session(self) -> CompilationSession: ...

    def load_benchmark(self, benchmark_uri: str, content_digest: str, content: bytes | None):
        key = (benchmark_uri, content_digest)
        artifact = self.cache.get(key)
        if artifact is None:
            artifact = self.parse_benchmark(benchmark_uri, content)
            self.cache.put(key, artifact)
        return artifact
