"""Wire-protocol client with timeouts, crash detection, and restart hooks.

One client multiplexes one connection. Requests are serialized under a
lock with per-request correlation ids, so the client object may be shared
across threads. A broken connection is surfaced as a typed error and the
next request transparently reconnects (respawning the service if this
client supervises one).
"""

from __future__ import annotations

import itertools
import socket
import threading

from optgym.errors import (
    BackendCrashError,
    BackendUnavailableError,
    ServiceTimeoutError,
    error_for_code,
)
from optgym.service import wire
from optgym.service.config import ServiceConfig

_CRASH_EXC = (wire.ConnectionClosed, ConnectionError, BrokenPipeError, OSError)


class ServiceClient:
    def __init__(self, supervisor, config: ServiceConfig | None = None):
        self.supervisor = supervisor
        self.config = config or ServiceConfig.default()
        self._sock: socket.socket | None = None
        self._lock = threading.Lock()
        self._ids = itertools.count(1)
        self.round_trips = 0

    # ------------------------------------------------------------------
    def _connect(self) -> None:
        attempts = 0
        while True:
            host, port = self.supervisor.address()
            try:
                sock = socket.create_connection((host, port), timeout=self.config.start_timeout)
            except OSError:
                attempts += 1
                if not self.supervisor.notify_crash() or attempts > self.config.max_retries + 1:
                    raise BackendUnavailableError(f"cannot connect to {host}:{port}")
                continue
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            sock.settimeout(self.config.per_call_timeout + self.config.grace)
            self._sock = sock
            return

    def _drop_connection(self) -> None:
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
            self._sock = None

    def close(self) -> None:
        with self._lock:
            self._drop_connection()

    # ------------------------------------------------------------------
    def request(self, kind: str, **fields) -> dict:
        """One round trip. Raises the typed error for Error replies."""
        with self._lock:
            if self._sock is None:
                self._connect()
            request_id = next(self._ids)
            message = {"id": request_id, "kind": kind}
            message.update(fields)
            try:
                self._sock.sendall(wire.encode_frame(message))
                reply = wire.read_frame(self._sock.recv)
            except socket.timeout:
                # A hung backend is unrecoverable in place: kill and report.
                self._drop_connection()
                self.supervisor.notify_crash()
                raise ServiceTimeoutError(
                    f"{kind}: no reply within {self.config.per_call_timeout + self.config.grace}s"
                )
            except _CRASH_EXC:
                self._drop_connection()
                self.supervisor.notify_crash()
                raise BackendCrashError(f"connection lost during {kind}")
            self.round_trips += 1
            if reply.get("id") != request_id:
                self._drop_connection()
                raise BackendCrashError("correlation id mismatch")
            self.supervisor.notify_healthy()
        if reply.get("kind") == wire.ERROR:
            raise error_for_code(reply.get("code", "internal"), reply.get("detail", ""))
        return reply

    # ------------------------------------------------------------------
    def get_spaces(self) -> dict:
        return self.request(wire.GET_SPACES)

    def start_session(
        self,
        benchmark: str,
        action_space_id: str = "",
        observation_space_ids: list[str] | None = None,
        content: bytes | None = None,
        content_digest: str = "",
    ) -> dict:
        fields = {
            "benchmark": benchmark,
            "action_space_id": action_space_id,
            "observation_space_ids": observation_space_ids or [],
            "content_digest": content_digest,
        }
        if content is not None:
            fields["content"] = content.decode("utf-8")
        return self.request(wire.START_SESSION, **fields)

    def step(self, session_id: int, actions: list, observation_space_ids: list[str]) -> dict:
        return self.request(
            wire.STEP,
            session_id=session_id,
            actions=actions,
            observation_space_ids=observation_space_ids,
        )

    def fork(self, session_id: int) -> int:
        return self.request(wire.FORK, session_id=session_id)["session_id"]

    def end_session(self, session_id: int) -> None:
        self.request(wire.END_SESSION, session_id=session_id)

    def stats(self) -> dict:
        return self.request(wire.STATS)

    def clear_cache(self) -> None:
        self.request(wire.CLEAR_CACHE)

    def inject_crash(self) -> None:
        """Fault injection: ask the service to hard-exit mid-call."""
        try:
            self.request(wire.CRASH)
        except (BackendCrashError, ServiceTimeoutError):
            pass
