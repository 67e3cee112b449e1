"""Dual-namespace store: append-only raw records plus processed metric points.

Backed by an embedded sqlite database on local disk. The raw namespace is
append-only and versioned per (source-id, natural-key); the processed
namespace holds one point per (metric-id, scope, window) with a freshness
stamp per (metric-id, scope). Safe for concurrent readers and writers
within one process; all access is serialized on an internal lock.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, IO, Iterable

from .domain import (
    MetricId,
    Granularity,
    Scope,
    TimeWindow,
    ValidationError,
    ValueKind,
    format_rfc3339,
    parse_rfc3339,
    value_kind,
)


class StorageError(Exception):
    """Raised when the backing store cannot be read or written."""


STATUS_TRIPLE_FIELDS = ("to-be-automated", "automated", "cannot-automate")

MetricValue = Any  # float | dict[str, int] depending on the metric's value kind


@dataclass(frozen=True, slots=True)
class RawRecord:
    """One as-fetched payload with source identity and natural key."""

    source_id: str
    natural_key: str
    fetched_at: datetime
    payload: str

    def __post_init__(self) -> None:
        if not self.source_id:
            raise ValidationError("source-id must be non-empty")
        if not self.natural_key:
            raise ValidationError("natural-key must be non-empty")
        if self.fetched_at.tzinfo is None:
            raise ValidationError("fetched-at must be timezone-aware")


@dataclass(frozen=True, slots=True)
class StoredRawRecord:
    record: RawRecord
    version: int


@dataclass(frozen=True, slots=True)
class MetricPoint:
    """One pre-computed metric value for (metric, scope, window)."""

    metric_id: MetricId
    scope: Scope
    window: TimeWindow
    value: MetricValue
    computed_at: datetime
    sample_size: int

    def __post_init__(self) -> None:
        kind = value_kind(self.metric_id)
        if kind is ValueKind.NUMBER:
            if not isinstance(self.value, (int, float)) or isinstance(self.value, bool):
                raise ValidationError(f"{self.metric_id.value} value must be a number")
        elif kind is ValueKind.DISTRIBUTION:
            self._check_counts_map(self.value)
        else:
            self._check_counts_map(self.value)
            if set(self.value) != set(STATUS_TRIPLE_FIELDS):
                raise ValidationError(
                    f"{self.metric_id.value} value must have exactly the fields {STATUS_TRIPLE_FIELDS}"
                )
        if self.sample_size < 0:
            raise ValidationError("sample-size must be non-negative")

    def _check_counts_map(self, value: Any) -> None:
        if not isinstance(value, dict) or not all(
            isinstance(k, str) and isinstance(v, int) and v >= 0 for k, v in value.items()
        ):
            raise ValidationError(
                f"{self.metric_id.value} value must map labels to non-negative counts"
            )

    def value_json(self) -> str:
        return json.dumps(self.value, sort_keys=True, separators=(",", ":"))

    def to_json(self) -> dict[str, Any]:
        return {
            "metric-id": self.metric_id.value,
            "scope": self.scope.key,
            "granularity": self.window.granularity.value,
            "window-start": format_rfc3339(self.window.start),
            "window-end": format_rfc3339(self.window.end),
            "value": self.value,
            "sample-size": self.sample_size,
            "computed-at": format_rfc3339(self.computed_at),
        }


@dataclass(frozen=True, slots=True)
class FreshnessStamp:
    metric_id: MetricId
    scope: Scope
    last_updated: datetime


_SCHEMA = """
CREATE TABLE IF NOT EXISTS raw_records (
    source_id   TEXT NOT NULL,
    natural_key TEXT NOT NULL,
    version     INTEGER NOT NULL,
    fetched_at  TEXT NOT NULL,
    payload     TEXT NOT NULL,
    PRIMARY KEY (source_id, natural_key, version)
);
CREATE TABLE IF NOT EXISTS metric_points (
    metric_id    TEXT NOT NULL,
    scope_key    TEXT NOT NULL,
    granularity  TEXT NOT NULL,
    window_start TEXT NOT NULL,
    window_end   TEXT NOT NULL,
    value_json   TEXT NOT NULL,
    sample_size  INTEGER NOT NULL,
    computed_at  TEXT NOT NULL,
    PRIMARY KEY (metric_id, scope_key, granularity, window_start)
);
CREATE TABLE IF NOT EXISTS freshness (
    metric_id    TEXT NOT NULL,
    scope_key    TEXT NOT NULL,
    last_updated TEXT NOT NULL,
    PRIMARY KEY (metric_id, scope_key)
);
"""


class Store:
    """Embedded store with "raw" and "processed" namespaces."""

    def __init__(self, path: str | Path):
        self._path = Path(path)
        if str(path) != ":memory:":
            self._path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        try:
            self._db = sqlite3.connect(str(path), check_same_thread=False)
            self._db.execute("PRAGMA journal_mode=WAL")
            self._db.executescript(_SCHEMA)
            self._db.commit()
        except sqlite3.Error as exc:
            raise StorageError(f"cannot open store at {path}: {exc}") from exc

    def close(self) -> None:
        with self._lock:
            self._db.close()

    def ping(self) -> bool:
        """Whether the store is reachable and writable."""
        try:
            with self._lock:
                self._db.execute("BEGIN IMMEDIATE")
                self._db.rollback()
            return True
        except sqlite3.Error:
            return False

    # -- raw namespace ------------------------------------------------------

    def append_raw(self, record: RawRecord) -> bool:
        """Append a record version; no-op when the latest payload is identical.

        Returns True when a new version was stored.
        """
        with self._lock:
            try:
                row = self._db.execute(
                    "SELECT version, payload FROM raw_records"
                    " WHERE source_id = ? AND natural_key = ?"
                    " ORDER BY version DESC LIMIT 1",
                    (record.source_id, record.natural_key),
                ).fetchone()
                if row is not None and row[1] == record.payload:
                    return False
                version = 1 if row is None else row[0] + 1
                self._db.execute(
                    "INSERT INTO raw_records VALUES (?, ?, ?, ?, ?)",
                    (
                        record.source_id,
                        record.natural_key,
                        version,
                        format_rfc3339(record.fetched_at),
                        record.payload,
                    ),
                )
                self._db.commit()
                return True
            except sqlite3.Error as exc:
                raise StorageError(f"append_raw failed: {exc}") from exc

    def read_raw(
        self,
        source_id: str | None = None,
        *,
        key_prefix: str | None = None,
        fetched_after: datetime | None = None,
        fetched_before: datetime | None = None,
        latest_only: bool = True,
    ) -> list[StoredRawRecord]:
        """Range-read raw records, latest version per key unless asked otherwise."""
        query = "SELECT source_id, natural_key, version, fetched_at, payload FROM raw_records"
        clauses, params = [], []
        if source_id is not None:
            clauses.append("source_id = ?")
            params.append(source_id)
        if key_prefix is not None:
            clauses.append("natural_key GLOB ?")
            params.append(key_prefix.replace("[", "[[]") + "*")
        if fetched_after is not None:
            clauses.append("fetched_at >= ?")
            params.append(format_rfc3339(fetched_after))
        if fetched_before is not None:
            clauses.append("fetched_at < ?")
            params.append(format_rfc3339(fetched_before))
        if clauses:
            query += " WHERE " + " AND ".join(clauses)
        query += " ORDER BY source_id, natural_key, version"
        with self._lock:
            rows = self._db.execute(query, params).fetchall()
        records = [
            StoredRawRecord(
                record=RawRecord(
                    source_id=row[0],
                    natural_key=row[1],
                    fetched_at=parse_rfc3339(row[3]),
                    payload=row[4],
                ),
                version=row[2],
            )
            for row in rows
        ]
        if latest_only:
            by_key: dict[tuple[str, str], StoredRawRecord] = {}
            for stored in records:
                by_key[(stored.record.source_id, stored.record.natural_key)] = stored
            records = sorted(
                by_key.values(), key=lambda s: (s.record.source_id, s.record.natural_key)
            )
        return records

    def raw_count(self) -> int:
        with self._lock:
            return self._db.execute("SELECT COUNT(*) FROM raw_records").fetchone()[0]

    # -- processed namespace ------------------------------------------------

    def upsert_metric(self, point: MetricPoint) -> None:
        """Replace the point sharing (metric, scope, window); refresh the stamp."""
        with self._lock:
            try:
                self._db.execute(
                    "INSERT OR REPLACE INTO metric_points VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                    (
                        point.metric_id.value,
                        point.scope.key,
                        point.window.granularity.value,
                        format_rfc3339(point.window.start),
                        format_rfc3339(point.window.end),
                        point.value_json(),
                        point.sample_size,
                        format_rfc3339(point.computed_at),
                    ),
                )
                # the stamp always equals the max computed-at over (metric, scope)
                self._db.execute(
                    "INSERT OR REPLACE INTO freshness"
                    " SELECT metric_id, scope_key, MAX(computed_at) FROM metric_points"
                    " WHERE metric_id = ? AND scope_key = ? GROUP BY metric_id, scope_key",
                    (point.metric_id.value, point.scope.key),
                )
                self._db.commit()
            except sqlite3.Error as exc:
                raise StorageError(f"upsert_metric failed: {exc}") from exc

    def query_metric(
        self,
        metric_id: MetricId,
        scope: Scope,
        granularity: Granularity,
        start: datetime | None = None,
        end: datetime | None = None,
    ) -> list[MetricPoint]:
        """Points ordered by window start; absent windows stay absent."""
        query = (
            "SELECT window_start, window_end, value_json, sample_size, computed_at"
            " FROM metric_points WHERE metric_id = ? AND scope_key = ? AND granularity = ?"
        )
        params: list[Any] = [metric_id.value, scope.key, granularity.value]
        if start is not None:
            query += " AND window_start >= ?"
            params.append(format_rfc3339(start))
        if end is not None:
            query += " AND window_start < ?"
            params.append(format_rfc3339(end))
        query += " ORDER BY window_start"
        with self._lock:
            rows = self._db.execute(query, params).fetchall()
        return [
            MetricPoint(
                metric_id=metric_id,
                scope=scope,
                window=TimeWindow(
                    start=parse_rfc3339(row[0]),
                    end=parse_rfc3339(row[1]),
                    granularity=granularity,
                ),
                value=json.loads(row[2]),
                sample_size=row[3],
                computed_at=parse_rfc3339(row[4]),
            )
            for row in rows
        ]

    def freshness(self, metric_id: MetricId, scope: Scope) -> FreshnessStamp | None:
        with self._lock:
            row = self._db.execute(
                "SELECT last_updated FROM freshness WHERE metric_id = ? AND scope_key = ?",
                (metric_id.value, scope.key),
            ).fetchone()
        if row is None:
            return None
        return FreshnessStamp(
            metric_id=metric_id, scope=scope, last_updated=parse_rfc3339(row[0])
        )

    def clear_processed(self) -> None:
        """Drop every metric point and freshness stamp (raw data untouched)."""
        with self._lock:
            self._db.execute("DELETE FROM metric_points")
            self._db.execute("DELETE FROM freshness")
            self._db.commit()

    def processed_count(self) -> int:
        with self._lock:
            return self._db.execute("SELECT COUNT(*) FROM metric_points").fetchone()[0]

    # -- inspection ---------------------------------------------------------

    def export(self, namespace: str, out: IO[str]) -> int:
        """Dump a namespace as deterministic JSON-lines; returns line count."""
        lines = self.export_lines(namespace)
        for line in lines:
            out.write(line + "\n")
        return len(lines)

    def export_lines(self, namespace: str) -> list[str]:
        if namespace == "raw":
            docs: Iterable[dict[str, Any]] = (
                {
                    "source-id": s.record.source_id,
                    "natural-key": s.record.natural_key,
                    "version": s.version,
                    "fetched-at": format_rfc3339(s.record.fetched_at),
                    "payload": s.record.payload,
                }
                for s in self.read_raw(latest_only=False)
            )
        elif namespace == "processed":
            with self._lock:
                rows = self._db.execute(
                    "SELECT metric_id, scope_key, granularity, window_start, window_end,"
                    " value_json, sample_size, computed_at FROM metric_points"
                    " ORDER BY metric_id, scope_key, granularity, window_start"
                ).fetchall()
            docs = (
                {
                    "metric-id": row[0],
                    "scope": row[1],
                    "granularity": row[2],
                    "window-start": row[3],
                    "window-end": row[4],
                    "value": json.loads(row[5]),
                    "sample-size": row[6],
                    "computed-at": row[7],
                }
                for row in rows
            )
        else:
            raise ValidationError(f"unknown namespace: {namespace!r}")
        return [json.dumps(doc, sort_keys=True, separators=(",", ":")) for doc in docs]
