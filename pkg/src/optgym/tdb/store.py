"""State-transition store: steps, observations, and derived transitions.

Rows arrive on a bounded queue drained by one background writer thread,
so logging never blocks an episode; on overflow rows are dropped and
counted rather than applied late. A post-processing pass derives the
deduplicated transitions table by joining every recorded action sequence
with its one-action extensions.
"""

from __future__ import annotations

import base64
import logging
import queue
import sqlite3
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path

from optgym.errors import OptGymError

logger = logging.getLogger(__name__)

DEFAULT_QUEUE_CAPACITY = 10_000

_SCHEMA = """
CREATE TABLE IF NOT EXISTS steps (
    benchmark TEXT NOT NULL,
    actions TEXT NOT NULL,
    state_digest TEXT NOT NULL,
    PRIMARY KEY (benchmark, actions)
);
CREATE TABLE IF NOT EXISTS observations (
    state_digest TEXT PRIMARY KEY,
    instcount INTEGER NOT NULL,
    opcode_histogram TEXT NOT NULL,
    ir_zlib BLOB NOT NULL
);
CREATE TABLE IF NOT EXISTS transitions (
    from_digest TEXT NOT NULL,
    action TEXT NOT NULL,
    to_digest TEXT NOT NULL,
    reward REAL NOT NULL,
    PRIMARY KEY (from_digest, action)
);
"""


class StoreUnwritableError(OptGymError):
    code = "store-unwritable"


@dataclass
class _Flush:
    event: threading.Event


def escape_action(name: str) -> str:
    """Make action names safe to comma-join (names may contain commas)."""
    return name.replace("%", "%25").replace(",", "%2C")


def unescape_action(name: str) -> str:
    return name.replace("%2C", ",").replace("%25", "%")


class TransitionStore:
    def __init__(self, path: str | Path, queue_capacity: int = DEFAULT_QUEUE_CAPACITY):
        self.path = str(path)
        try:
            self._conn = sqlite3.connect(self.path, check_same_thread=False)
            self._conn.executescript(_SCHEMA)
            self._conn.commit()
        except sqlite3.Error as e:
            raise StoreUnwritableError(f"{path}: {e}")
        self._read_lock = threading.Lock()
        self._queue: queue.Queue = queue.Queue(maxsize=queue_capacity)
        self.dropped_rows = 0
        self.nondeterminism_findings: list[tuple[str, str, str, str]] = []
        self._writer = threading.Thread(target=self._drain, daemon=True)
        self._writer.start()

    # ------------------------------------------------------------------
    def _drain(self) -> None:
        while True:
            item = self._queue.get()
            try:
                if isinstance(item, _Flush):
                    with self._read_lock:
                        self._conn.commit()
                    item.event.set()
                    continue
                sql, params = item
                with self._read_lock:
                    self._conn.execute(sql, params)
            except sqlite3.Error:
                logger.exception("transition store write failed")
            finally:
                self._queue.task_done()

    def _enqueue(self, sql: str, params: tuple) -> None:
        try:
            self._queue.put_nowait((sql, params))
        except queue.Full:
            self.dropped_rows += 1
            if self.dropped_rows == 1 or self.dropped_rows % 1000 == 0:
                logger.warning("transition store queue full; %d rows dropped", self.dropped_rows)

    def record_step(self, benchmark: str, actions: list[str], state_digest: str) -> None:
        self._enqueue(
            "INSERT OR IGNORE INTO steps (benchmark, actions, state_digest) VALUES (?, ?, ?)",
            (benchmark, ",".join(escape_action(a) for a in actions), state_digest),
        )

    def record_observation(
        self, state_digest: str, instcount: int, histogram: list[int], ir_text: str
    ) -> None:
        self._enqueue(
            "INSERT OR IGNORE INTO observations "
            "(state_digest, instcount, opcode_histogram, ir_zlib) VALUES (?, ?, ?, ?)",
            (
                state_digest,
                int(instcount),
                ",".join(str(x) for x in histogram),
                zlib.compress(ir_text.encode("utf-8")),
            ),
        )

    def flush(self) -> None:
        """Write-visibility barrier: all enqueued rows are committed after this."""
        barrier = _Flush(threading.Event())
        self._queue.put(barrier)
        barrier.event.wait()
        self._queue.join()

    # ------------------------------------------------------------------
    def _query(self, sql: str, params: tuple = ()) -> list[tuple]:
        with self._read_lock:
            return list(self._conn.execute(sql, params))

    def counts(self) -> dict[str, int]:
        return {
            table: self._query(f"SELECT COUNT(*) FROM {table}")[0][0]
            for table in ("steps", "observations", "transitions")
        }

    def dedup_transitions(self) -> int:
        """Populate the transitions table; returns the number of new rows.

        A second run over the same data inserts nothing. A (from, action)
        pair resolving to two different destination states is recorded as
        a nondeterminism finding instead of a second row.
        """
        rows = self._query("SELECT benchmark, actions, state_digest FROM steps")
        digest_by_key = {(benchmark, actions): digest for benchmark, actions, digest in rows}
        instcount = {d: c for d, c in self._query("SELECT state_digest, instcount FROM observations")}
        created = 0
        with self._read_lock:
            for (benchmark, actions), to_digest in sorted(digest_by_key.items()):
                if not actions:
                    continue
                parent = self._find_parent(digest_by_key, benchmark, actions)
                if parent is None:
                    continue
                from_digest, action = parent
                reward = float(instcount.get(from_digest, 0) - instcount.get(to_digest, 0))
                existing = list(
                    self._conn.execute(
                        "SELECT to_digest FROM transitions WHERE from_digest=? AND action=?",
                        (from_digest, action),
                    )
                )
                if existing:
                    if existing[0][0] != to_digest:
                        self.nondeterminism_findings.append(
                            (from_digest, action, existing[0][0], to_digest)
                        )
                        logger.warning(
                            "nondeterministic transition: %s --%s--> %s vs %s",
                            from_digest[:12], action, existing[0][0][:12], to_digest[:12],
                        )
                    continue
                self._conn.execute(
                    "INSERT INTO transitions (from_digest, action, to_digest, reward) "
                    "VALUES (?, ?, ?, ?)",
                    (from_digest, action, to_digest, reward),
                )
                created += 1
            self._conn.commit()
        return created

    @staticmethod
    def _find_parent(
        digest_by_key: dict, benchmark: str, actions: str
    ) -> tuple[str, str] | None:
        """(parent digest, final action name) for a steps row.

        Escaping makes every comma a separator, so the parent is the
        sequence minus its last element. Rows written from multi-action
        batches have no recorded parent and derive no edge.
        """
        prefix, separator, last = actions.rpartition(",")
        parent = digest_by_key.get((benchmark, prefix if separator else ""))
        if parent is None:
            return None
        return parent, unescape_action(last)

    def referential_integrity_violations(self) -> list[str]:
        problems = []
        for digest, in self._query(
            "SELECT state_digest FROM steps WHERE state_digest NOT IN "
            "(SELECT state_digest FROM observations)"
        ):
            problems.append(f"steps digest {digest} missing from observations")
        for column in ("from_digest", "to_digest"):
            for digest, in self._query(
                f"SELECT {column} FROM transitions WHERE {column} NOT IN "
                "(SELECT state_digest FROM observations)"
            ):
                problems.append(f"transitions {column} {digest} missing from observations")
        return problems

    # ------------------------------------------------------------------
    EXPORT_FILES = ("steps.tsv", "observations.tsv", "transitions.tsv")

    def export(self, directory: str | Path) -> dict[str, int]:
        """Write the three TSV files; returns row counts per file."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        counts = {}

        with open(directory / "steps.tsv", "w", encoding="utf-8") as f:
            f.write("benchmark\tactions\tstate_digest\n")
            rows = self._query("SELECT benchmark, actions, state_digest FROM steps ORDER BY 1, 2")
            for row in rows:
                f.write("\t".join(row) + "\n")
            counts["steps.tsv"] = len(rows)

        with open(directory / "observations.tsv", "w", encoding="utf-8") as f:
            f.write("state_digest\tinstcount\topcode_histogram\tir_base64\n")
            rows = self._query(
                "SELECT state_digest, instcount, opcode_histogram, ir_zlib "
                "FROM observations ORDER BY 1"
            )
            for digest, count, histogram, ir_zlib in rows:
                ir64 = base64.b64encode(zlib.decompress(ir_zlib)).decode("ascii")
                f.write(f"{digest}\t{count}\t{histogram}\t{ir64}\n")
            counts["observations.tsv"] = len(rows)

        with open(directory / "transitions.tsv", "w", encoding="utf-8") as f:
            f.write("from_digest\taction\tto_digest\treward\n")
            rows = self._query(
                "SELECT from_digest, action, to_digest, reward FROM transitions ORDER BY 1, 2"
            )
            for from_digest, action, to_digest, reward in rows:
                f.write(f"{from_digest}\t{action}\t{to_digest}\t{reward!r}\n")
            counts["transitions.tsv"] = len(rows)
        return counts

    def import_tsv(self, directory: str | Path) -> dict[str, int]:
        """Load an exported directory into this store (the round-trip path)."""
        directory = Path(directory)
        counts = {}
        with self._read_lock:
            with open(directory / "steps.tsv", encoding="utf-8") as f:
                rows = [line.rstrip("\n").split("\t") for line in f][1:]
                self._conn.executemany(
                    "INSERT OR IGNORE INTO steps VALUES (?, ?, ?)", rows
                )
                counts["steps.tsv"] = len(rows)
            with open(directory / "observations.tsv", encoding="utf-8") as f:
                rows = [line.rstrip("\n").split("\t") for line in f][1:]
                self._conn.executemany(
                    "INSERT OR IGNORE INTO observations VALUES (?, ?, ?, ?)",
                    [
                        (d, int(c), h, zlib.compress(base64.b64decode(ir64)))
                        for d, c, h, ir64 in rows
                    ],
                )
                counts["observations.tsv"] = len(rows)
            with open(directory / "transitions.tsv", encoding="utf-8") as f:
                rows = [line.rstrip("\n").split("\t") for line in f][1:]
                self._conn.executemany(
                    "INSERT OR IGNORE INTO transitions VALUES (?, ?, ?, ?)",
                    [(a, b, c, float(r)) for a, b, c, r in rows],
                )
                counts["transitions.tsv"] = len(rows)
            self._conn.commit()
        return counts

    def close(self) -> None:
        self.flush()
        self._conn.close()
