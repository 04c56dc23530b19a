"""Server-side session trees over live environments.

Each session owns one environment plus a tree of explored states.
Stepping from any node forks the search: a child node is appended and
existing nodes are never mutated, so a UI can explore what-if branches
safely. The live environment is replayed to a node's state only when a
step starts somewhere other than the current frontier.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

import optgym
from optgym.errors import OptGymError, SessionExpiredError, UnknownEnvironmentError
from optgym.registry import environment_spec

DEFAULT_SESSION_CAP = 1000
DEFAULT_TTL_SECONDS = 30 * 60

SERIES_METRICS = ("instcount", "cumulative_reward")


@dataclass
class TreeNode:
    id: int
    parent: int | None
    action: str | None
    reward: float
    cumulative_reward: float
    instcount: float
    digest: str
    children: list[int] = field(default_factory=list)
    deduped: bool = False

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "parent": self.parent,
            "action": self.action,
            "reward": self.reward,
            "cumulative_reward": self.cumulative_reward,
            "instcount": self.instcount,
            "digest": self.digest,
            "children": list(self.children),
            "deduped": self.deduped,
        }


class NodeNotFound(OptGymError):
    code = "node-not-found"


class RestSession:
    def __init__(self, env_spec_id: str, benchmark: str, datasets=None, make_kwargs=None):
        spec = environment_spec(env_spec_id)
        self.id = uuid.uuid4().hex[:16]
        self.env_spec_id = env_spec_id
        self.benchmark = benchmark
        self.cost_metric = spec.cost_metric
        self.lock = threading.Lock()
        self.last_used = time.time()
        self.env = optgym.make(
            env_spec_id,
            benchmark,
            reward_space=spec.reward_spaces[0].id,
            datasets=datasets,
            **(make_kwargs or {}),
        )
        self.env.reset()
        instcount = float(self.env.observe(self.cost_metric))
        root = TreeNode(
            id=0,
            parent=None,
            action=None,
            reward=0.0,
            cumulative_reward=0.0,
            instcount=instcount,
            digest=self.env.state_digest,
        )
        self.nodes: dict[int, TreeNode] = {0: root}
        self.root = 0
        self._next_id = 1
        self._current_node = 0

    # ------------------------------------------------------------------
    def node(self, node_id: int) -> TreeNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise NodeNotFound(f"node {node_id}")

    def path_actions(self, node_id: int) -> list[str]:
        actions: list[str] = []
        node = self.node(node_id)
        while node.parent is not None:
            actions.append(node.action)
            node = self.nodes[node.parent]
        return list(reversed(actions))

    def _seek(self, node_id: int) -> None:
        if self._current_node == node_id:
            return
        self.env.reset()
        actions = self.path_actions(node_id)
        if actions:
            self.env.step(actions)
        self._current_node = node_id

    def step_from(self, node_id: int, action) -> TreeNode:
        """Apply one action from an existing node; append (never mutate)."""
        with self.lock:
            parent = self.node(node_id)
            self._seek(node_id)
            reply = self.env.step([action], observation_spaces=[self.cost_metric])
            if reply.done and "error" in reply.info:
                self._current_node = -1  # live env state is unknown now
                raise OptGymError(reply.info.get("detail", reply.info["error"]))
            child = TreeNode(
                id=self._next_id,
                parent=node_id,
                action=self.env.actions[-1],
                reward=reply.rewards[0] if reply.rewards else 0.0,
                cumulative_reward=self.env.cumulative_reward,
                instcount=float(reply.observations[0]),
                digest=self.env.state_digest,
            )
            child.deduped = any(
                self.nodes[sibling].digest == child.digest for sibling in parent.children
            )
            self._next_id += 1
            self.nodes[child.id] = child
            parent.children.append(child.id)
            self._current_node = child.id
            return child

    def series(self, node_id: int, metric: str) -> list[float]:
        if metric not in SERIES_METRICS:
            raise OptGymError(f"unknown metric {metric!r}")
        values: list[float] = []
        node = self.node(node_id)
        while node is not None:
            values.append(getattr(node, metric))
            node = self.nodes[node.parent] if node.parent is not None else None
        return list(reversed(values))

    def tree_dict(self) -> dict:
        return {
            "session_id": self.id,
            "root": self.root,
            "benchmark": self.benchmark,
            "env": self.env_spec_id,
            "nodes": {str(i): n.to_dict() for i, n in self.nodes.items()},
        }

    def close(self) -> None:
        self.env.close()


class SessionManager:
    def __init__(
        self,
        datasets=None,
        session_cap: int = DEFAULT_SESSION_CAP,
        ttl_seconds: float = DEFAULT_TTL_SECONDS,
        make_kwargs: dict | None = None,
    ):
        self.datasets = datasets
        self.session_cap = session_cap
        self.ttl_seconds = ttl_seconds
        self.make_kwargs = make_kwargs or {}
        self._sessions: dict[str, RestSession] = {}
        self._lock = threading.Lock()

    def _evict_expired(self) -> None:
        now = time.time()
        for sid in [
            sid for sid, s in self._sessions.items() if now - s.last_used > self.ttl_seconds
        ]:
            self._sessions.pop(sid).close()

    def create(self, env_spec_id: str, benchmark: str) -> RestSession:
        environment_spec(env_spec_id)  # raises UnknownEnvironmentError early
        with self._lock:
            self._evict_expired()
            if len(self._sessions) >= self.session_cap:
                raise SessionCapError(f"session cap {self.session_cap} reached")
            session = RestSession(
                env_spec_id, benchmark, datasets=self.datasets, make_kwargs=self.make_kwargs
            )
            self._sessions[session.id] = session
            return session

    def get(self, session_id: str) -> RestSession:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise SessionExpiredError(f"session {session_id}")
            if time.time() - session.last_used > self.ttl_seconds:
                self._sessions.pop(session_id).close()
                raise SessionExpiredError(f"session {session_id}")
            session.last_used = time.time()
            return session

    def delete(self, session_id: str) -> None:
        with self._lock:
            session = self._sessions.pop(session_id, None)
        if session is not None:
            session.close()

    def close_all(self) -> None:
        with self._lock:
            for session in self._sessions.values():
                session.close()
            self._sessions.clear()


class SessionCapError(OptGymError):
    code = "session-cap-exceeded"


__all__ = [
    "NodeNotFound",
    "RestSession",
    "SessionCapError",
    "SessionManager",
    "TreeNode",
    "UnknownEnvironmentError",
]
