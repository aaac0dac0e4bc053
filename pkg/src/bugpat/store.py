"""Change-pattern grouping, metrics and the on-disk pattern database.

Deltas with identical (before_key, after_key) pairs form one change
pattern; digest keys drive the grouping, the stored texts only verify
that no digest collision slipped in. Everything lives in a single
SQLite file and round-trips through a canonical JSON Lines export.
"""

import json
import sqlite3
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Mapping, Optional, Union

from .diff import CodeDelta, DeltaKind
from .repo import CommitRecord


class DigestCollisionError(Exception):
    """Equal digest keys with different stored texts."""


class StoreError(Exception):
    """Database missing, malformed, or used inconsistently."""


@dataclass
class PatternMetrics:
    size: int  # statements in the before-text
    files: int  # distinct paths among the deltas
    commits: int  # distinct commit ids
    authors: int  # distinct commit authors
    support: int  # delta count
    matched: int = -1  # match count in the target revision; -1 = not computed


@dataclass(frozen=True)
class DeltaRecord:
    """A delta as stored: texts and keys, without statement objects."""

    id: int
    commit_id: str
    path: str
    kind: DeltaKind
    before_key: str
    after_key: str
    before_text: str
    after_text: str
    before_line_span: Optional[tuple[int, int]]
    after_line_span: Optional[tuple[int, int]]
    pattern_id: Optional[int] = None


@dataclass
class ChangePattern:
    id: int
    before_key: str
    after_key: str
    before_text: str
    after_text: str
    deltas: list = field(default_factory=list)
    metrics: Optional[PatternMetrics] = None

    @property
    def size(self) -> int:
        return 0 if not self.before_key else self.before_key.count(",") + 1


def group_deltas(deltas: Iterable) -> list[ChangePattern]:
    """Partition deltas by (before_key, after_key), first occurrence first.

    Accepts CodeDelta or DeltaRecord objects. Raises
    DigestCollisionError when equal keys carry different texts.
    """
    by_key: dict[tuple[str, str], ChangePattern] = {}
    for delta in deltas:
        key = (delta.before_key, delta.after_key)
        pattern = by_key.get(key)
        if pattern is None:
            pattern = ChangePattern(
                id=len(by_key) + 1,
                before_key=delta.before_key,
                after_key=delta.after_key,
                before_text=delta.before_text,
                after_text=delta.after_text,
            )
            by_key[key] = pattern
        elif (
            pattern.before_text != delta.before_text
            or pattern.after_text != delta.after_text
        ):
            raise DigestCollisionError(
                f"digest collision on pattern {pattern.id}: "
                f"same keys, different texts ({delta.path} @ {delta.commit_id})"
            )
        pattern.deltas.append(delta)
    return list(by_key.values())


def compute_metrics(
    pattern: ChangePattern, commits: Mapping[str, CommitRecord]
) -> PatternMetrics:
    """The six per-pattern metrics; matched stays -1 until matching runs."""
    commit_ids = {d.commit_id for d in pattern.deltas}
    return PatternMetrics(
        size=pattern.size,
        files=len({d.path for d in pattern.deltas}),
        commits=len(commit_ids),
        authors=len({commits[c].author for c in commit_ids}),
        support=len(pattern.deltas),
    )


_SCHEMA = """
CREATE TABLE meta (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE commits (
    id TEXT PRIMARY KEY,
    author TEXT NOT NULL,
    timestamp INTEGER NOT NULL,
    log TEXT NOT NULL,
    is_bugfix INTEGER NOT NULL
);
CREATE TABLE deltas (
    id INTEGER PRIMARY KEY,
    commit_id TEXT NOT NULL REFERENCES commits(id),
    path TEXT NOT NULL,
    kind TEXT NOT NULL,
    before_key TEXT NOT NULL,
    after_key TEXT NOT NULL,
    before_text TEXT NOT NULL,
    after_text TEXT NOT NULL,
    before_start INTEGER,
    before_end INTEGER,
    after_start INTEGER,
    after_end INTEGER,
    pattern_id INTEGER
);
CREATE TABLE patterns (
    id INTEGER PRIMARY KEY,
    before_key TEXT NOT NULL,
    after_key TEXT NOT NULL,
    before_text TEXT NOT NULL,
    after_text TEXT NOT NULL,
    size INTEGER NOT NULL,
    files INTEGER NOT NULL,
    commits INTEGER NOT NULL,
    authors INTEGER NOT NULL,
    support INTEGER NOT NULL,
    matched INTEGER NOT NULL DEFAULT -1
);
CREATE INDEX idx_deltas_pattern ON deltas(pattern_id);
CREATE INDEX idx_patterns_before_key ON patterns(before_key);
"""


class PatternStore:
    """Single-file SQLite store for commits, deltas and patterns."""

    def __init__(self, conn: sqlite3.Connection):
        self._conn = conn
        self._next_delta_id = 1 + (
            conn.execute("SELECT COALESCE(MAX(id), 0) FROM deltas").fetchone()[0]
        )

    @classmethod
    def create(cls, path: Union[str, Path] = ":memory:") -> "PatternStore":
        if str(path) != ":memory:":
            Path(path).unlink(missing_ok=True)
        conn = sqlite3.connect(str(path))
        conn.executescript(_SCHEMA)
        return cls(conn)

    @classmethod
    def open(cls, path: Union[str, Path]) -> "PatternStore":
        if not Path(path).is_file():
            raise StoreError(f"pattern database not found: {path}")
        conn = sqlite3.connect(str(path))
        try:
            conn.execute("SELECT id FROM patterns LIMIT 1")
        except sqlite3.DatabaseError as exc:
            conn.close()
            raise StoreError(f"not a pattern database: {path} ({exc})") from exc
        return cls(conn)

    def close(self):
        self._conn.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()

    # -- write path ------------------------------------------------------

    def add_commit(self, record: CommitRecord):
        self._conn.execute(
            "INSERT OR REPLACE INTO commits VALUES (?,?,?,?,?)",
            (
                record.id,
                record.author,
                record.timestamp,
                record.log_message,
                int(record.is_bugfix),
            ),
        )

    def add_delta(self, delta: CodeDelta) -> int:
        delta_id = self._next_delta_id
        self._next_delta_id += 1
        before_span = delta.before_line_span or (None, None)
        after_span = delta.after_line_span or (None, None)
        self._conn.execute(
            "INSERT INTO deltas VALUES (?,?,?,?,?,?,?,?,?,?,?,?,NULL)",
            (
                delta_id,
                delta.commit_id,
                delta.path,
                delta.kind.value,
                delta.before_key,
                delta.after_key,
                delta.before_text,
                delta.after_text,
                before_span[0],
                before_span[1],
                after_span[0],
                after_span[1],
            ),
        )
        return delta_id

    def build_patterns(self) -> list[ChangePattern]:
        """Group all stored deltas into patterns and persist the result."""
        self._conn.execute("DELETE FROM patterns")
        self._conn.execute("UPDATE deltas SET pattern_id = NULL")
        commits = self.commits()
        patterns = group_deltas(self._iter_delta_records())
        for pattern in patterns:
            pattern.metrics = compute_metrics(pattern, commits)
            m = pattern.metrics
            self._conn.execute(
                "INSERT INTO patterns VALUES (?,?,?,?,?,?,?,?,?,?,?)",
                (
                    pattern.id,
                    pattern.before_key,
                    pattern.after_key,
                    pattern.before_text,
                    pattern.after_text,
                    m.size,
                    m.files,
                    m.commits,
                    m.authors,
                    m.support,
                    m.matched,
                ),
            )
            self._conn.executemany(
                "UPDATE deltas SET pattern_id = ? WHERE id = ?",
                [(pattern.id, d.id) for d in pattern.deltas],
            )
        self._conn.commit()
        return patterns

    def set_matched(self, counts: Mapping[int, int]):
        self._conn.executemany(
            "UPDATE patterns SET matched = ? WHERE id = ?",
            [(count, pid) for pid, count in counts.items()],
        )
        self._conn.commit()

    def set_meta(self, key: str, value: str):
        self._conn.execute("INSERT OR REPLACE INTO meta VALUES (?,?)", (key, value))
        self._conn.commit()

    def get_meta(self, key: str) -> Optional[str]:
        row = self._conn.execute("SELECT value FROM meta WHERE key = ?", (key,)).fetchone()
        return row[0] if row else None

    def commit(self):
        self._conn.commit()

    # -- read path -------------------------------------------------------

    def commits(self) -> dict[str, CommitRecord]:
        rows = self._conn.execute(
            "SELECT id, author, timestamp, log, is_bugfix FROM commits ORDER BY rowid"
        )
        return {
            row[0]: CommitRecord(row[0], row[1], row[2], row[3], bool(row[4]))
            for row in rows
        }

    def bugfix_commit_ids(self) -> frozenset[str]:
        rows = self._conn.execute("SELECT id FROM commits WHERE is_bugfix = 1")
        return frozenset(row[0] for row in rows)

    def _delta_from_row(self, row) -> DeltaRecord:
        return DeltaRecord(
            id=row[0],
            commit_id=row[1],
            path=row[2],
            kind=DeltaKind(row[3]),
            before_key=row[4],
            after_key=row[5],
            before_text=row[6],
            after_text=row[7],
            before_line_span=None if row[8] is None else (row[8], row[9]),
            after_line_span=None if row[10] is None else (row[10], row[11]),
            pattern_id=row[12],
        )

    _DELTA_COLS = (
        "id, commit_id, path, kind, before_key, after_key, before_text, "
        "after_text, before_start, before_end, after_start, after_end, pattern_id"
    )

    def _iter_delta_records(self):
        rows = self._conn.execute(f"SELECT {self._DELTA_COLS} FROM deltas ORDER BY id")
        for row in rows:
            yield self._delta_from_row(row)

    def deltas(self) -> list[DeltaRecord]:
        return list(self._iter_delta_records())

    def deltas_of_pattern(self, pattern_id: int) -> list[DeltaRecord]:
        rows = self._conn.execute(
            f"SELECT {self._DELTA_COLS} FROM deltas WHERE pattern_id = ? ORDER BY id",
            (pattern_id,),
        )
        return [self._delta_from_row(row) for row in rows]

    def patterns(self, with_deltas: bool = False) -> list[ChangePattern]:
        rows = self._conn.execute(
            "SELECT id, before_key, after_key, before_text, after_text, "
            "size, files, commits, authors, support, matched "
            "FROM patterns ORDER BY id"
        ).fetchall()
        patterns = []
        deltas_by_pattern: dict[int, list[DeltaRecord]] = {}
        if with_deltas:
            for delta in self._iter_delta_records():
                if delta.pattern_id is not None:
                    deltas_by_pattern.setdefault(delta.pattern_id, []).append(delta)
        for row in rows:
            metrics = PatternMetrics(
                size=row[5], files=row[6], commits=row[7],
                authors=row[8], support=row[9], matched=row[10],
            )
            patterns.append(
                ChangePattern(
                    id=row[0],
                    before_key=row[1],
                    after_key=row[2],
                    before_text=row[3],
                    after_text=row[4],
                    deltas=deltas_by_pattern.get(row[0], []),
                    metrics=metrics,
                )
            )
        return patterns

    def pattern(self, pattern_id: int, with_deltas: bool = True) -> ChangePattern:
        for pattern in self.patterns(with_deltas=with_deltas):
            if pattern.id == pattern_id:
                return pattern
        raise StoreError(f"no pattern with id {pattern_id}")

    def pattern_count(self) -> int:
        return self._conn.execute("SELECT COUNT(*) FROM patterns").fetchone()[0]

    def delta_count(self) -> int:
        return self._conn.execute("SELECT COUNT(*) FROM deltas").fetchone()[0]


# -- canonical JSON Lines export/import -----------------------------------


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n"


def export_jsonl(store: PatternStore, stream: IO[str]):
    """Write the store as JSON Lines: commits, then patterns, then deltas.

    Keys are sorted and ids included, so import followed by export is
    byte-identical.
    """
    for record in store.commits().values():
        stream.write(
            _dump(
                {
                    "record": "commit",
                    "id": record.id,
                    "author": record.author,
                    "timestamp": record.timestamp,
                    "log": record.log_message,
                    "is_bugfix": record.is_bugfix,
                }
            )
        )
    for pattern in store.patterns():
        m = pattern.metrics
        stream.write(
            _dump(
                {
                    "record": "pattern",
                    "id": pattern.id,
                    "before_key": pattern.before_key,
                    "after_key": pattern.after_key,
                    "before_text": pattern.before_text,
                    "after_text": pattern.after_text,
                    "size": m.size,
                    "files": m.files,
                    "commits": m.commits,
                    "authors": m.authors,
                    "support": m.support,
                    "matched": m.matched,
                }
            )
        )
    for delta in store.deltas():
        stream.write(
            _dump(
                {
                    "record": "delta",
                    "id": delta.id,
                    "commit_id": delta.commit_id,
                    "path": delta.path,
                    "kind": delta.kind.value,
                    "before_key": delta.before_key,
                    "after_key": delta.after_key,
                    "before_text": delta.before_text,
                    "after_text": delta.after_text,
                    "before_line_span": delta.before_line_span,
                    "after_line_span": delta.after_line_span,
                    "pattern_id": delta.pattern_id,
                }
            )
        )


def import_jsonl(stream: IO[str], path: Union[str, Path] = ":memory:") -> PatternStore:
    """Rebuild a store from a JSON Lines export.

    The digest-key integrity invariant is re-checked while reading: a
    key seen with two different texts aborts the import.
    """
    store = PatternStore.create(path)
    conn = store._conn
    texts_by_key: dict[str, str] = {}

    def check_keys(obj):
        for key_field, text_field in (
            ("before_key", "before_text"),
            ("after_key", "after_text"),
        ):
            key, text = obj[key_field], obj[text_field]
            known = texts_by_key.setdefault(key, text)
            if known != text:
                raise ValueError(f"digest collision on key {key!r}")

    for line_no, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            kind = obj["record"]
            if kind == "commit":
                conn.execute(
                    "INSERT INTO commits VALUES (?,?,?,?,?)",
                    (
                        obj["id"],
                        obj["author"],
                        obj["timestamp"],
                        obj["log"],
                        int(obj["is_bugfix"]),
                    ),
                )
            elif kind == "pattern":
                check_keys(obj)
                conn.execute(
                    "INSERT INTO patterns VALUES (?,?,?,?,?,?,?,?,?,?,?)",
                    (
                        obj["id"],
                        obj["before_key"],
                        obj["after_key"],
                        obj["before_text"],
                        obj["after_text"],
                        obj["size"],
                        obj["files"],
                        obj["commits"],
                        obj["authors"],
                        obj["support"],
                        obj["matched"],
                    ),
                )
            elif kind == "delta":
                check_keys(obj)
                before_span = obj["before_line_span"] or (None, None)
                after_span = obj["after_line_span"] or (None, None)
                conn.execute(
                    "INSERT INTO deltas VALUES (?,?,?,?,?,?,?,?,?,?,?,?,?)",
                    (
                        obj["id"],
                        obj["commit_id"],
                        obj["path"],
                        obj["kind"],
                        obj["before_key"],
                        obj["after_key"],
                        obj["before_text"],
                        obj["after_text"],
                        before_span[0],
                        before_span[1],
                        after_span[0],
                        after_span[1],
                        obj["pattern_id"],
                    ),
                )
            else:
                raise ValueError(f"unknown record type {kind!r}")
        except (ValueError, KeyError, TypeError, sqlite3.Error) as exc:
            store.close()
            raise StoreError(f"line {line_no}: malformed record ({exc})") from exc
    conn.commit()
    store._next_delta_id = 1 + (
        conn.execute("SELECT COALESCE(MAX(id), 0) FROM deltas").fetchone()[0]
    )
    return store
