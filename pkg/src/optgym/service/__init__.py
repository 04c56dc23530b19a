"""Service lifecycle: start, reuse, and tear down backend processes.

Services are reference-counted per (backend, options) key so repeated
``make()`` calls share one process and its benchmark cache. All spawned
services are killed at interpreter exit.
"""

from __future__ import annotations

import atexit
import threading

from optgym.service.client import ServiceClient
from optgym.service.config import ServiceConfig
from optgym.service.session import Backend, CompilationSession
from optgym.service.supervisor import ServiceSupervisor, StaticAddress, default_argv

__all__ = [
    "Backend",
    "CompilationSession",
    "ServiceClient",
    "ServiceConfig",
    "ServiceHandle",
    "connect_service",
    "shutdown_all_services",
    "start_service",
]


class ServiceHandle:
    def __init__(self, backend_name: str, client: ServiceClient, supervisor):
        self.backend_name = backend_name
        self.client = client
        self.supervisor = supervisor
        self.refs = 0
        self._spaces: dict | None = None

    def spaces(self, refresh: bool = False) -> dict:
        if self._spaces is None or refresh:
            self._spaces = self.client.get_spaces()
        return self._spaces

    def acquire(self) -> "ServiceHandle":
        self.refs += 1
        return self

    def release(self) -> None:
        self.refs = max(0, self.refs - 1)

    def shutdown(self) -> None:
        self.client.close()
        self.supervisor.kill()


_registry: dict[tuple, ServiceHandle] = {}
_registry_lock = threading.Lock()


def start_service(
    backend_name: str,
    config: ServiceConfig | None = None,
    options: dict[str, str] | None = None,
    argv: list[str] | None = None,
    reuse: bool = True,
) -> ServiceHandle:
    """Launch (or reuse) a supervised service process for a backend.

    Readiness is confirmed by a GetSpaces round trip within the start
    timeout; the one-off startup cost is paid here.
    """
    config = config or ServiceConfig.default()
    options = dict(options or {})
    key = (backend_name, tuple(sorted(options.items())))
    with _registry_lock:
        if reuse and argv is None and key in _registry:
            return _registry[key].acquire()
        supervisor = ServiceSupervisor(
            argv or default_argv(backend_name, config, options),
            start_timeout=config.start_timeout,
            max_retries=config.max_retries,
        )
        client = ServiceClient(supervisor, config)
        handle = ServiceHandle(backend_name, client, supervisor)
        handle.spaces()  # readiness round trip
        if reuse and argv is None:
            _registry[key] = handle
        return handle.acquire()


def connect_service(
    host: str, port: int, backend_name: str = "remote", config: ServiceConfig | None = None
) -> ServiceHandle:
    """Attach to an already-running service (possibly on another machine)."""
    client = ServiceClient(StaticAddress(host, port), config or ServiceConfig.default())
    handle = ServiceHandle(backend_name, client, client.supervisor)
    handle.spaces()
    return handle.acquire()


def shutdown_all_services() -> None:
    with _registry_lock:
        for handle in _registry.values():
            handle.shutdown()
        _registry.clear()


atexit.register(shutdown_all_services)
