"""Cron-driven orchestration of connector jobs with retry, backoff, and fallback.

Each source runs on its own cron schedule with bounded parallelism and
per-source mutual exclusion. A failing fetch is retried up to five times
with exponentially increasing delays; rate-limited responses extend the
wait to the advertised Retry-After. When a run exhausts its retries the
previous watermark and raw data stay untouched, so downstream consumers
keep serving the last successfully fetched data, and a failure
notification goes to the configured channel. Missed firings during
downtime coalesce into a single catch-up run.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta
from enum import Enum
from pathlib import Path
from typing import Callable

from .alerting import Notification
from .clock import Clock
from .connectors import (
    Connector,
    ConnectorRegistry,
    FetchOutcome,
    FetchStatus,
    SourceDescriptor,
    check_credentials,
)
from .cron import parse_cron
from .domain import ValidationError, format_rfc3339, parse_rfc3339
from .storage import Store, StorageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class RetryPolicy:
    """Exponential backoff: delay(n) = base_delay * multiplier ** (n - 1)."""

    max_attempts: int = 5
    base_delay: float = 1.0
    multiplier: float = 2.0

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValidationError("max-attempts must be at least 1")
        if self.base_delay <= 0:
            raise ValidationError("base-delay must be positive")
        if self.multiplier <= 1:
            raise ValidationError("backoff multiplier must exceed 1")

    def delay(self, attempt: int) -> float:
        return self.base_delay * self.multiplier ** (attempt - 1)


class FinalStatus(str, Enum):
    SUCCEEDED = "succeeded"
    EXHAUSTED = "exhausted"
    RATE_DEFERRED = "rate-deferred"


@dataclass(frozen=True, slots=True)
class Attempt:
    number: int
    started_at: datetime
    status: FetchStatus
    reason: str = ""
    waited_seconds: float = 0.0


@dataclass(frozen=True, slots=True)
class JobRun:
    source_id: str
    scheduled_at: datetime
    attempts: tuple[Attempt, ...]
    final_status: FinalStatus
    records_fetched: int = 0
    records_stored: int = 0
    new_watermark: str | None = None
    finished_at: datetime | None = None


def run_job(
    source: SourceDescriptor,
    connector: Connector,
    *,
    policy: RetryPolicy,
    clock: Clock,
    store: Store,
    watermark: str | None,
    notify: Callable[[Notification], None] | None = None,
) -> JobRun:
    """Run one fetch-and-store job, stopping at the first success.

    Failures retry up to the policy's attempt budget; rate limits wait for
    max(Retry-After, next backoff delay). Nothing is written and the
    watermark stays unchanged unless a fetch succeeds.
    """
    scheduled_at = clock.now()
    attempts: list[Attempt] = []
    outcome: FetchOutcome | None = None
    for number in range(1, policy.max_attempts + 1):
        started_at = clock.now()
        try:
            outcome = connector.fetch(source, watermark)
        except Exception as exc:  # connectors should not raise; treat as transient
            logger.exception("connector for %s raised", source.source_id)
            outcome = FetchOutcome.transient(f"connector raised: {exc}")
        if outcome.status is FetchStatus.SUCCESS:
            try:
                stored = sum(1 for r in outcome.records if store.append_raw(r))
            except StorageError as exc:
                outcome = FetchOutcome.transient(f"store append failed: {exc}")
            else:
                attempts.append(Attempt(number, started_at, FetchStatus.SUCCESS))
                return JobRun(
                    source_id=source.source_id,
                    scheduled_at=scheduled_at,
                    attempts=tuple(attempts),
                    final_status=FinalStatus.SUCCEEDED,
                    records_fetched=len(outcome.records),
                    records_stored=stored,
                    new_watermark=outcome.new_watermark,
                    finished_at=clock.now(),
                )
        waited = 0.0
        if number < policy.max_attempts:
            waited = policy.delay(number)
            if outcome.status is FetchStatus.RATE_LIMITED:
                waited = max(waited, outcome.retry_after)
        attempts.append(Attempt(number, started_at, outcome.status, outcome.reason, waited))
        if number < policy.max_attempts:
            clock.sleep(waited)

    final = (
        FinalStatus.RATE_DEFERRED
        if outcome is not None and outcome.status is FetchStatus.RATE_LIMITED
        else FinalStatus.EXHAUSTED
    )
    run = JobRun(
        source_id=source.source_id,
        scheduled_at=scheduled_at,
        attempts=tuple(attempts),
        final_status=final,
        finished_at=clock.now(),
    )
    if final is FinalStatus.EXHAUSTED and notify is not None:
        reasons = "; ".join(
            f"#{a.number} {a.status.value}: {a.reason}" for a in attempts if a.reason
        )
        notify(
            Notification(
                kind="ingestion-failure",
                text=(
                    f"ingestion for source '{source.source_id}' exhausted "
                    f"{policy.max_attempts} attempts; serving last good data"
                ),
                body={
                    "source-id": source.source_id,
                    "attempts": len(attempts),
                    "reasons": reasons,
                    "scheduled-at": format_rfc3339(scheduled_at),
                },
            )
        )
    return run


@dataclass
class SchedulerState:
    """Restart-safe cursor state: watermarks plus the last tick instant."""

    last_tick: datetime
    watermarks: dict[str, str] = field(default_factory=dict)
    credential_warned_at: dict[str, datetime] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "last-tick": format_rfc3339(self.last_tick),
            "watermarks": dict(sorted(self.watermarks.items())),
            "credential-warned-at": {
                k: format_rfc3339(v) for k, v in sorted(self.credential_warned_at.items())
            },
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SchedulerState":
        return cls(
            last_tick=parse_rfc3339(doc["last-tick"]),
            watermarks=dict(doc.get("watermarks", {})),
            credential_warned_at={
                k: parse_rfc3339(v) for k, v in doc.get("credential-warned-at", {}).items()
            },
        )

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "SchedulerState | None":
        path = Path(path)
        if not path.exists():
            return None
        return cls.from_json(json.loads(path.read_text(encoding="utf-8")))


@dataclass(frozen=True, slots=True)
class SkippedFiring:
    source_id: str
    at: datetime
    reason: str


class Scheduler:
    """Ticks cron schedules and runs due connector jobs.

    Jobs run on a bounded thread pool (or inline for deterministic tests);
    a source never runs concurrently with itself — overlapping firings are
    recorded as skips. Credential expiry is checked each tick with a
    re-warn suppression window.
    """

    def __init__(
        self,
        registry: ConnectorRegistry,
        store: Store,
        *,
        policy: RetryPolicy,
        clock: Clock | None = None,
        state_path: str | Path | None = None,
        parallelism: int = 4,
        notify: Callable[[Notification], None] | None = None,
        on_complete: Callable[[JobRun], None] | None = None,
        inline: bool = False,
        credential_warn_horizon: timedelta = timedelta(days=7),
        credential_rewarn_after: timedelta = timedelta(hours=24),
    ):
        self.registry = registry
        self.store = store
        self.policy = policy
        self.clock = clock or Clock()
        self.state_path = Path(state_path) if state_path else None
        self.notify = notify or (lambda notification: None)
        self.on_complete = on_complete
        self.inline = inline
        self.credential_warn_horizon = credential_warn_horizon
        self.credential_rewarn_after = credential_rewarn_after
        self.skips: list[SkippedFiring] = []
        self._schedules = {
            source.source_id: parse_cron(source.schedule) for source in registry.sources()
        }
        self._running: set[str] = set()
        self._lock = threading.Lock()
        self._pool = None if inline else ThreadPoolExecutor(max_workers=max(1, parallelism))
        loaded = SchedulerState.load(self.state_path) if self.state_path else None
        self.state = loaded or SchedulerState(last_tick=self.clock.now())

    # -- execution ----------------------------------------------------------

    def _execute(self, source: SourceDescriptor) -> JobRun:
        _, connector = self.registry.get(source.source_id)
        with self._lock:
            watermark = self.state.watermarks.get(source.source_id)
        try:
            run = run_job(
                source,
                connector,
                policy=self.policy,
                clock=self.clock,
                store=self.store,
                watermark=watermark,
                notify=self.notify,
            )
            if run.final_status is FinalStatus.SUCCEEDED and run.new_watermark is not None:
                with self._lock:
                    self.state.watermarks[source.source_id] = run.new_watermark
        finally:
            with self._lock:
                self._running.discard(source.source_id)
        self.save_state()
        if self.on_complete is not None:
            self.on_complete(run)
        return run

    def run_source(self, source_id: str) -> JobRun:
        """Run one source to completion now (one-shot ingestion)."""
        source, _ = self.registry.get(source_id)
        with self._lock:
            if source_id in self._running:
                raise ValidationError(f"source already running: {source_id}")
            self._running.add(source_id)
        return self._execute(source)

    def run_all(self) -> list[JobRun]:
        return [self.run_source(source.source_id) for source in self.registry.sources()]

    # -- ticking ------------------------------------------------------------

    def tick(self, now: datetime | None = None) -> list[str]:
        """Start every job whose schedule fired since the last tick.

        Multiple missed firings coalesce into one run; a source still
        running is skipped, not queued.
        """
        now = now or self.clock.now()
        due: list[SourceDescriptor] = []
        with self._lock:
            last = self.state.last_tick
            if now > last:
                for source in self.registry.sources():
                    schedule = self._schedules[source.source_id]
                    fired = next(schedule.fires_between(last, now), None)
                    if fired is None:
                        continue
                    if source.source_id in self._running:
                        self.skips.append(
                            SkippedFiring(source.source_id, now, "previous run still active")
                        )
                        continue
                    self._running.add(source.source_id)
                    due.append(source)
                self.state.last_tick = now
        self._check_credentials(now)
        futures: list[Future] = []
        for source in due:
            if self.inline:
                self._execute(source)
            else:
                futures.append(self._pool.submit(self._execute, source))
        self.save_state()
        return [source.source_id for source in due]

    def _check_credentials(self, now: datetime) -> None:
        for source in self.registry.sources():
            warning = check_credentials(source, now, self.credential_warn_horizon)
            if warning is None:
                continue
            with self._lock:
                warned = self.state.credential_warned_at.get(source.source_id)
                if warned is not None and now - warned < self.credential_rewarn_after:
                    continue
                self.state.credential_warned_at[source.source_id] = now
            self.notify(
                Notification(
                    kind="credential-expiry",
                    text=warning.message(),
                    body={
                        "source-id": warning.source_id,
                        "expires-at": format_rfc3339(warning.expires_at),
                    },
                )
            )

    # -- state --------------------------------------------------------------

    def save_state(self) -> None:
        if self.state_path is not None:
            with self._lock:
                snapshot = replace(
                    self.state,
                    watermarks=dict(self.state.watermarks),
                    credential_warned_at=dict(self.state.credential_warned_at),
                )
            snapshot.save(self.state_path)

    def shutdown(self, wait: bool = True) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=wait)
        self.save_state()
