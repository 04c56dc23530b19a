"""Wire protocol: length-prefixed JSON frames over a stream.

Each frame is a 4-byte big-endian byte length followed by a UTF-8 JSON
body. Requests carry a monotonically increasing ``id`` which replies
echo; error replies use kind ``Error`` with a machine-readable ``code``.
The framing is byte-exact so non-Python clients can speak it.
"""

from __future__ import annotations

import json
import struct

MAX_FRAME_BYTES = 256 * 1024 * 1024

# Request kinds understood by every service.
GET_SPACES = "GetSpaces"
START_SESSION = "StartSession"
STEP = "Step"
FORK = "Fork"
END_SESSION = "EndSession"
STATS = "Stats"
CLEAR_CACHE = "ClearCache"
CRASH = "Crash"  # fault injection: hard-exit the service mid-call
ERROR = "Error"

_HEADER = struct.Struct(">I")


class ConnectionClosed(Exception):
    pass


def encode_frame(message: dict) -> bytes:
    body = json.dumps(message, separators=(",", ":")).encode("utf-8")
    if len(body) > MAX_FRAME_BYTES:
        raise ValueError(f"frame too large: {len(body)} bytes")
    return _HEADER.pack(len(body)) + body


def read_exact(read, n: int) -> bytes:
    chunks = []
    remaining = n
    while remaining:
        chunk = read(remaining)
        if not chunk:
            raise ConnectionClosed()
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(read) -> dict:
    (length,) = _HEADER.unpack(read_exact(read, 4))
    if length > MAX_FRAME_BYTES:
        raise ConnectionClosed()
    return json.loads(read_exact(read, length).decode("utf-8"))


def error_reply(request_id: int, code: str, detail: str = "") -> dict:
    return {"id": request_id, "kind": ERROR, "code": code, "detail": detail}


def reply(request_id: int, kind: str, **fields) -> dict:
    out = {"id": request_id, "kind": kind}
    out.update(fields)
    return out
