"""The shared service runtime: maps the wire protocol onto backend sessions.

One runtime instance hosts many concurrent sessions of a single backend.
Requests for distinct sessions may interleave freely; requests touching
one session are serialized by a per-session lock. Every request kind has
a defined reply for every session state, so clients never hang on a
protocol hole.
"""

from __future__ import annotations

import logging
import os
import socket
import threading
import time

from optgym.errors import (
    OptGymError,
    SessionCapExceededError,
    SessionNotFoundError,
    UnknownSpaceError,
)
from optgym.service import wire
from optgym.service.session import Backend, CompilationSession

logger = logging.getLogger(__name__)


class _Session:
    def __init__(self, session_id: int, impl: CompilationSession):
        self.id = session_id
        self.impl = impl
        self.lock = threading.Lock()


class ServiceRuntime:
    def __init__(self, backend: Backend, per_call_timeout: float = 300.0, session_cap: int = 64):
        self.backend = backend
        self.per_call_timeout = per_call_timeout
        self.session_cap = session_cap
        self._sessions: dict[int, _Session] = {}
        self._sessions_lock = threading.Lock()
        self._next_session_id = 1
        self._started_at = time.time()

    # ------------------------------------------------------------------
    def handle(self, request: dict) -> dict | None:
        """Process one request; None means crash without replying."""
        request_id = request.get("id", 0)
        kind = request.get("kind", "")
        try:
            if kind == wire.GET_SPACES:
                return wire.reply(
                    request_id,
                    kind,
                    action_spaces=[s.to_dict() for s in self.backend.action_spaces()],
                    observation_spaces=[s.to_dict() for s in self.backend.observation_spaces()],
                )
            if kind == wire.START_SESSION:
                return self._start_session(request_id, request)
            if kind == wire.STEP:
                return self._step(request_id, request)
            if kind == wire.FORK:
                return self._fork(request_id, request)
            if kind == wire.END_SESSION:
                with self._sessions_lock:
                    self._sessions.pop(int(request["session_id"]), None)
                return wire.reply(request_id, kind)
            if kind == wire.STATS:
                with self._sessions_lock:
                    n = len(self._sessions)
                return wire.reply(request_id, kind, sessions=n, cache=self.backend.cache.stats())
            if kind == wire.CLEAR_CACHE:
                self.backend.cache.clear()
                return wire.reply(request_id, kind)
            if kind == wire.CRASH:
                logging.shutdown()
                os._exit(17)
            return wire.error_reply(request_id, "internal", f"unknown request kind {kind!r}")
        except OptGymError as e:
            return wire.error_reply(request_id, e.code, e.message)
        except Exception as e:  # never let a backend bug kill the reply loop
            logger.exception("unhandled error in %s", kind)
            return wire.error_reply(request_id, "internal", f"{type(e).__name__}: {e}")

    def _get_session(self, request: dict) -> _Session:
        session_id = int(request["session_id"])
        with self._sessions_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise SessionNotFoundError(f"session {session_id}")
        return session

    def _register(self, impl: CompilationSession) -> _Session:
        with self._sessions_lock:
            if len(self._sessions) >= self.session_cap:
                raise SessionCapExceededError(f"session cap {self.session_cap} reached")
            session = _Session(self._next_session_id, impl)
            self._next_session_id += 1
            self._sessions[session.id] = session
        return session

    def _observe(self, impl: CompilationSession, space_ids: list[str]) -> list:
        known = {s.id for s in self.backend.observation_spaces()}
        values = []
        for space_id in space_ids:
            if space_id not in known:
                raise UnknownSpaceError(space_id)
            values.append(impl.set_observation(space_id))
        return values

    def _start_session(self, request_id: int, request: dict) -> dict:
        benchmark = request["benchmark"]
        content = request.get("content")
        if content is not None:
            content = content.encode("utf-8")
        artifact = self.backend.load_benchmark(
            benchmark, request.get("content_digest", ""), content
        )
        impl = self.backend.new_session()
        impl.init(request.get("action_space_id", ""), benchmark, artifact)
        session = self._register(impl)
        observations = self._observe(impl, request.get("observation_space_ids", []))
        return wire.reply(
            request_id,
            wire.START_SESSION,
            session_id=session.id,
            observations=observations,
        )

    def _step(self, request_id: int, request: dict) -> dict:
        session = self._get_session(request)
        deadline = time.monotonic() + self.per_call_timeout
        with session.lock:
            done = False
            changed = False
            for action in request.get("actions", []):
                if time.monotonic() > deadline:
                    with self._sessions_lock:
                        self._sessions.pop(session.id, None)
                    return wire.error_reply(request_id, "timeout", "per-call timeout inside batch")
                end, space_changed = session.impl.apply_action(action)
                changed = changed or space_changed
                if end:
                    done = True
                    break
            observations = self._observe(session.impl, request.get("observation_space_ids", []))
        return wire.reply(
            request_id,
            wire.STEP,
            observations=observations,
            done=done,
            action_space_changed=changed,
        )

    def _fork(self, request_id: int, request: dict) -> dict:
        session = self._get_session(request)
        with session.lock:
            child = session.impl.fork()
        new = self._register(child)
        return wire.reply(request_id, wire.FORK, session_id=new.id)

    # ------------------------------------------------------------------
    def serve_socket(self, host: str, port: int, announce=None) -> None:
        listener = socket.create_server((host, port))
        bound_port = listener.getsockname()[1]
        if announce:
            announce(bound_port)
        while True:
            conn, _ = listener.accept()
            threading.Thread(target=self._serve_connection, args=(conn,), daemon=True).start()

    def _serve_connection(self, conn: socket.socket) -> None:
        conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        try:
            while True:
                try:
                    request = wire.read_frame(conn.recv)
                except (wire.ConnectionClosed, ConnectionError, OSError):
                    return
                response = self.handle(request)
                if response is not None:
                    conn.sendall(wire.encode_frame(response))
        finally:
            conn.close()

    def serve_stdio(self) -> None:
        stdin = open(0, "rb", buffering=0)
        stdout = open(1, "wb", buffering=0)
        while True:
            try:
                request = wire.read_frame(stdin.read)
            except wire.ConnectionClosed:
                return
            response = self.handle(request)
            if response is not None:
                stdout.write(wire.encode_frame(response))
