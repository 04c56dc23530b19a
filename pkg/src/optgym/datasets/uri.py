"""Benchmark URIs: ``benchmark://<dataset>/<path>``.

Dataset names carry a version suffix (``-v<int>``) so that regenerated or
repackaged datasets never silently alias old results.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_URI_RE = re.compile(r"^benchmark://(?P<dataset>[A-Za-z0-9_.-]+-v\d+)/(?P<path>.+)$")


@dataclass(frozen=True)
class BenchmarkUri:
    dataset: str
    path: str

    def __str__(self) -> str:
        return f"benchmark://{self.dataset}/{self.path}"

    @classmethod
    def parse(cls, uri: str | "BenchmarkUri") -> "BenchmarkUri":
        if isinstance(uri, BenchmarkUri):
            return uri
        m = _URI_RE.match(uri)
        if not m:
            raise ValueError(f"malformed benchmark URI {uri!r}")
        return cls(m.group("dataset"), m.group("path"))
