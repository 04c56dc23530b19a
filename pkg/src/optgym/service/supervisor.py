"""Child-process supervision: spawn, readiness, restart-on-crash.

The supervisor restarts a crashed service at most ``max_retries`` times
per recovery event; a healthy round trip resets the budget. Sessions are
never migrated across a restart — the episode is lost and the client
reports it, which is the contract training loops rely on.
"""

from __future__ import annotations

import logging
import subprocess
import sys
import threading
import time

from optgym.errors import BackendUnavailableError, SpawnFailureError, StartTimeoutError

logger = logging.getLogger(__name__)

_ANNOUNCE_PREFIX = "OPTGYM-SERVICE PORT "


def default_argv(backend: str, config, options: dict[str, str]) -> list[str]:
    argv = [
        sys.executable,
        "-m",
        "optgym.service.run",
        backend,
        "--port=0",
        f"--timeout={config.per_call_timeout}",
        f"--session-cap={config.session_cap}",
        f"--cache-capacity={config.cache_capacity}",
    ]
    for key, value in sorted(options.items()):
        argv.append(f"--option={key}={value}")
    return argv


class ServiceSupervisor:
    def __init__(self, argv: list[str], start_timeout: float = 60.0, max_retries: int = 1):
        self.argv = list(argv)
        self.start_timeout = start_timeout
        self.max_retries = max_retries
        self._proc: subprocess.Popen | None = None
        self._address: tuple[str, int] | None = None
        self._lock = threading.RLock()
        self._failed_restarts = 0
        self.restart_count = 0

    @property
    def pid(self) -> int | None:
        return self._proc.pid if self._proc else None

    def address(self) -> tuple[str, int]:
        with self._lock:
            if self._proc is None or self._proc.poll() is not None:
                self._spawn()
            assert self._address is not None
            return self._address

    def _spawn(self) -> None:
        was_running = self._proc is not None
        if was_running:
            self.restart_count += 1
        try:
            proc = subprocess.Popen(
                self.argv,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
            )
        except OSError as e:
            raise SpawnFailureError(f"{self.argv[0]}: {e}")
        deadline = time.monotonic() + self.start_timeout
        line = ""
        # The child announces its port as its first stdout line.
        announce: list[str] = []

        def read_line():
            announce.append(proc.stdout.readline())

        reader = threading.Thread(target=read_line, daemon=True)
        reader.start()
        reader.join(max(0.0, deadline - time.monotonic()))
        line = announce[0] if announce else ""
        if not line.startswith(_ANNOUNCE_PREFIX):
            code = proc.poll()
            proc.kill()
            if code is not None and code != 0:
                raise SpawnFailureError(f"service exited with code {code} before announcing")
            if reader.is_alive():
                raise StartTimeoutError(f"no announcement within {self.start_timeout}s")
            raise SpawnFailureError(f"bad announcement {line!r}")
        self._proc = proc
        self._address = ("127.0.0.1", int(line[len(_ANNOUNCE_PREFIX) :].strip()))

    def notify_healthy(self) -> None:
        with self._lock:
            self._failed_restarts = 0

    def notify_crash(self) -> bool:
        """Account for a detected crash; True if a restart may be attempted."""
        with self._lock:
            if self._proc is not None and self._proc.poll() is None:
                self._proc.kill()
                self._proc.wait()
            if self._failed_restarts >= self.max_retries:
                return False
            self._failed_restarts += 1
            return True

    def require_restart_budget(self) -> None:
        with self._lock:
            if self._failed_restarts > self.max_retries:
                raise BackendUnavailableError("restart budget exhausted")

    def kill(self) -> None:
        with self._lock:
            if self._proc is not None and self._proc.poll() is None:
                self._proc.kill()
                self._proc.wait()


class StaticAddress:
    """Supervisor stand-in for remote services the client cannot manage."""

    def __init__(self, host: str, port: int):
        self._address = (host, int(port))
        self.pid = None
        self.restart_count = 0

    def address(self) -> tuple[str, int]:
        return self._address

    def notify_healthy(self) -> None:
        pass

    def notify_crash(self) -> bool:
        return False

    def kill(self) -> None:
        pass
