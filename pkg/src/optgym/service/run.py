"""Service executable: ``python -m optgym.service.run <backend> --port=N``.

Port 0 binds an ephemeral port and announces it on stdout as
``OPTGYM-SERVICE PORT <n>`` so a supervisor can connect without races.
``--stdio`` serves a single connection over stdin/stdout instead.

Imports stay lazy and minimal here: service startup time is a measured
cost.
"""

from __future__ import annotations

import argparse
import sys

BACKEND_FACTORIES = {
    "tinyir": ("optgym.tinyir.backend", "TinyIrBackend"),
    "gcc": ("optgym.gcc.backend", "GccBackend"),
}


def make_backend(name: str, cache_capacity: int, options: dict[str, str]):
    try:
        module_name, class_name = BACKEND_FACTORIES[name]
    except KeyError:
        raise SystemExit(f"unknown backend {name!r}")
    module = __import__(module_name, fromlist=[class_name])
    cls = getattr(module, class_name)
    return cls(cache_capacity=cache_capacity, **options)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="optgym-service")
    parser.add_argument("backend", choices=sorted(BACKEND_FACTORIES))
    parser.add_argument("--port", type=int, default=None)
    parser.add_argument("--stdio", action="store_true")
    parser.add_argument("--timeout", type=float, default=300.0)
    parser.add_argument("--session-cap", type=int, default=64)
    parser.add_argument("--cache-capacity", type=int, default=128)
    parser.add_argument(
        "--option", action="append", default=[], metavar="K=V", help="backend option"
    )
    args = parser.parse_args(argv)

    options = {}
    for item in args.option:
        key, _, value = item.partition("=")
        options[key] = value

    from optgym.service.server import ServiceRuntime

    backend = make_backend(args.backend, args.cache_capacity, options)
    runtime = ServiceRuntime(
        backend, per_call_timeout=args.timeout, session_cap=args.session_cap
    )
    if args.stdio:
        runtime.serve_stdio()
        return 0
    if args.port is None:
        parser.error("one of --port or --stdio is required")

    def announce(port: int) -> None:
        sys.stdout.write(f"OPTGYM-SERVICE PORT {port}\n")
        sys.stdout.flush()

    runtime.serve_socket("127.0.0.1", args.port, announce=announce)
    return 0


if __name__ == "__main__":
    sys.exit(main())
