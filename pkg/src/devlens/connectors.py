"""Pluggable source adapters that fetch raw records with incremental watermarks.

At desk scale the real vendor systems are replaced by two connector
families: fixture connectors reading `<root>/<source-id>/*.jsonl` files of
canonical events, and an HTTP connector (pointed at local stubs in tests)
that exercises bearer auth, Retry-After, and transient-failure paths. A
scripted connector supports deterministic scheduler testing.
"""

from __future__ import annotations

import hashlib
import json
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from email.utils import parsedate_to_datetime
from enum import Enum
from pathlib import Path
from typing import Callable, Protocol, Sequence

from . import cron
from .clock import Clock
from .domain import (
    Event,
    ValidationError,
    format_rfc3339,
    natural_key,
    natural_timestamp,
    parse_event_line,
    parse_rfc3339,
)
from .storage import RawRecord


class ConnectorError(Exception):
    """Raised for connector misconfiguration (not per-fetch failures)."""


@dataclass(frozen=True, slots=True)
class SourceDescriptor:
    """Identity, schedule, and credential metadata for one telemetry source."""

    source_id: str
    schedule: str
    credential_expiry: datetime | None = None

    def __post_init__(self) -> None:
        if not self.source_id:
            raise ValidationError("source-id must be non-empty")
        cron.parse_cron(self.schedule)


@dataclass(frozen=True, slots=True)
class CredentialWarning:
    source_id: str
    expires_at: datetime
    remaining: timedelta

    def message(self) -> str:
        hours = self.remaining / timedelta(hours=1)
        return (
            f"credentials for source '{self.source_id}' expire at "
            f"{format_rfc3339(self.expires_at)} ({hours:.1f}h remaining)"
        )


def check_credentials(
    source: SourceDescriptor, now: datetime, warn_horizon: timedelta
) -> CredentialWarning | None:
    """Warn when the source's credentials expire within the horizon."""
    if source.credential_expiry is None:
        return None
    remaining = source.credential_expiry - now
    if remaining <= warn_horizon:
        return CredentialWarning(
            source_id=source.source_id,
            expires_at=source.credential_expiry,
            remaining=remaining,
        )
    return None


class FetchStatus(str, Enum):
    SUCCESS = "success"
    TRANSIENT_FAILURE = "transient-failure"
    RATE_LIMITED = "rate-limited"
    PERMANENT_FAILURE = "permanent-failure"


@dataclass(frozen=True, slots=True)
class FetchOutcome:
    status: FetchStatus
    records: tuple[RawRecord, ...] = ()
    new_watermark: str | None = None
    reason: str = ""
    retry_after: float = 0.0

    def __post_init__(self) -> None:
        if self.retry_after < 0:
            raise ValidationError("retry-after must be non-negative")

    @classmethod
    def success(cls, records: Sequence[RawRecord], new_watermark: str | None) -> "FetchOutcome":
        return cls(FetchStatus.SUCCESS, records=tuple(records), new_watermark=new_watermark)

    @classmethod
    def transient(cls, reason: str) -> "FetchOutcome":
        return cls(FetchStatus.TRANSIENT_FAILURE, reason=reason)

    @classmethod
    def rate_limited(cls, retry_after: float) -> "FetchOutcome":
        return cls(FetchStatus.RATE_LIMITED, retry_after=retry_after, reason="rate limited")

    @classmethod
    def permanent(cls, reason: str) -> "FetchOutcome":
        return cls(FetchStatus.PERMANENT_FAILURE, reason=reason)


class Connector(Protocol):
    def fetch(self, source: SourceDescriptor, watermark: str | None) -> FetchOutcome: ...


# ---------------------------------------------------------------------------
# Watermarks
# ---------------------------------------------------------------------------
# A watermark is an opaque cursor; these connectors encode it as JSON holding
# the newest event timestamp plus the identities of already-seen opaque blobs
# (payloads that failed event parsing carry no usable timestamp).


def _watermark_decode(watermark: str | None) -> tuple[datetime | None, set[str]]:
    if watermark is None:
        return None, set()
    try:
        doc = json.loads(watermark)
        ts = parse_rfc3339(doc["event-ts"]) if doc.get("event-ts") else None
        blobs = set(doc.get("blob-keys", []))
        return ts, blobs
    except (ValueError, TypeError, KeyError) as exc:
        raise ConnectorError(f"unreadable watermark: {watermark!r}") from exc


def _watermark_encode(ts: datetime | None, blobs: set[str]) -> str:
    return json.dumps(
        {"event-ts": format_rfc3339(ts) if ts else None, "blob-keys": sorted(blobs)},
        sort_keys=True,
        separators=(",", ":"),
    )


def _collect(
    lines: list[tuple[str, str]],
    watermark: str | None,
    platforms: frozenset[str],
    fetched_at: datetime,
    source_id: str,
) -> FetchOutcome:
    """Turn (blob-key, payload) lines into records newer than the watermark."""
    last_ts, seen_blobs = _watermark_decode(watermark)
    records: list[RawRecord] = []
    max_ts = last_ts
    new_blobs = set(seen_blobs)
    for blob_key, payload in lines:
        try:
            event: Event | None = parse_event_line(payload, platforms)
        except ValidationError:
            event = None
        if event is None:
            # unparseable payloads are kept as opaque blobs, not dropped
            if blob_key in seen_blobs:
                continue
            new_blobs.add(blob_key)
            records.append(
                RawRecord(
                    source_id=source_id,
                    natural_key=blob_key,
                    fetched_at=fetched_at,
                    payload=payload,
                )
            )
            continue
        ts = natural_timestamp(event)
        if last_ts is not None and ts <= last_ts:
            continue
        if max_ts is None or ts > max_ts:
            max_ts = ts
        records.append(
            RawRecord(
                source_id=source_id,
                natural_key=natural_key(event),
                fetched_at=fetched_at,
                payload=payload,
            )
        )
    return FetchOutcome.success(records, _watermark_encode(max_ts, new_blobs))


class FixtureConnector:
    """Reads canonical events from `<root>/<source-id>/*.jsonl` files.

    A pure function of (fixture set, watermark): repeated fetches never
    return a record twice, and lines that fail schema parsing surface as
    opaque blob records keyed by file position.
    """

    def __init__(self, root: str | Path, platforms: frozenset[str], clock: Clock | None = None):
        self.root = Path(root)
        self.platforms = platforms
        self.clock = clock or Clock()

    def fetch(self, source: SourceDescriptor, watermark: str | None) -> FetchOutcome:
        source_dir = self.root / source.source_id
        if not source_dir.is_dir():
            return FetchOutcome.permanent(f"missing fixture directory: {source_dir}")
        lines: list[tuple[str, str]] = []
        try:
            for path in sorted(source_dir.glob("*.jsonl")):
                for lineno, line in enumerate(
                    path.read_text(encoding="utf-8").splitlines(), start=1
                ):
                    if not line.strip():
                        continue
                    lines.append((f"{path.name}:{lineno}", line))
        except OSError as exc:
            return FetchOutcome.transient(f"fixture read failed: {exc}")
        return _collect(lines, watermark, self.platforms, self.clock.now(), source.source_id)


class HttpConnector:
    """Fetches newline-delimited canonical events over HTTP.

    Honors Retry-After on 429/503, treats auth rejections as permanent,
    and maps connection problems and 5xx responses to transient failures.
    """

    def __init__(
        self,
        url: str,
        platforms: frozenset[str],
        token: str | None = None,
        timeout: float = 10.0,
        clock: Clock | None = None,
    ):
        self.url = url
        self.platforms = platforms
        self.token = token
        self.timeout = timeout
        self.clock = clock or Clock()

    def _retry_after_seconds(self, header: str | None) -> float:
        if not header:
            return 60.0
        header = header.strip()
        if header.isdigit():
            return float(header)
        try:
            when = parsedate_to_datetime(header)
            return max(0.0, (when - self.clock.now()).total_seconds())
        except (TypeError, ValueError):
            return 60.0

    def fetch(self, source: SourceDescriptor, watermark: str | None) -> FetchOutcome:
        url = self.url
        if watermark is not None:
            sep = "&" if "?" in url else "?"
            url = f"{url}{sep}since={urllib.parse.quote(watermark)}"
        request = urllib.request.Request(url)
        if self.token:
            request.add_header("Authorization", f"Bearer {self.token}")
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                body = response.read().decode("utf-8")
        except urllib.error.HTTPError as exc:
            if exc.code in (401, 403):
                return FetchOutcome.permanent(f"credentials rejected (HTTP {exc.code})")
            if exc.code in (429, 503) and (exc.code == 429 or exc.headers.get("Retry-After")):
                return FetchOutcome.rate_limited(
                    self._retry_after_seconds(exc.headers.get("Retry-After"))
                )
            if exc.code == 404:
                return FetchOutcome.permanent(f"endpoint not found (HTTP {exc.code})")
            return FetchOutcome.transient(f"HTTP {exc.code}")
        except (urllib.error.URLError, OSError, UnicodeDecodeError) as exc:
            return FetchOutcome.transient(f"request failed: {exc}")
        lines = []
        for line in body.splitlines():
            if not line.strip():
                continue
            digest = hashlib.sha256(line.encode("utf-8")).hexdigest()[:24]
            lines.append((f"blob:{digest}", line))
        return _collect(lines, watermark, self.platforms, self.clock.now(), source.source_id)


class ScriptedConnector:
    """Replays a fixed outcome sequence; repeats the last entry when drained.

    Entries are FetchOutcome values or callables producing one, so tests can
    script failure runs like four transient failures followed by a success.
    """

    def __init__(self, script: Sequence[FetchOutcome | Callable[[], FetchOutcome]]):
        if not script:
            raise ConnectorError("scripted connector needs at least one outcome")
        self.script = list(script)
        self.calls = 0

    def fetch(self, source: SourceDescriptor, watermark: str | None) -> FetchOutcome:
        entry = self.script[min(self.calls, len(self.script) - 1)]
        self.calls += 1
        return entry() if callable(entry) else entry


@dataclass
class ConnectorRegistry:
    """Maps registered sources to their connector instances."""

    _entries: dict[str, tuple[SourceDescriptor, Connector]] = field(default_factory=dict)

    def register(self, source: SourceDescriptor, connector: Connector) -> None:
        if source.source_id in self._entries:
            raise ConnectorError(f"duplicate source-id: {source.source_id}")
        self._entries[source.source_id] = (source, connector)

    def sources(self) -> list[SourceDescriptor]:
        return [entry[0] for entry in self._entries.values()]

    def get(self, source_id: str) -> tuple[SourceDescriptor, Connector]:
        try:
            return self._entries[source_id]
        except KeyError:
            raise ConnectorError(f"unregistered source: {source_id}") from None

    def __contains__(self, source_id: str) -> bool:
        return source_id in self._entries

    def __len__(self) -> int:
        return len(self._entries)
