import threading
from datetime import datetime, timedelta, timezone

import pytest

from devlens.clock import Clock, SimClock
from devlens.connectors import (
    ConnectorRegistry,
    FetchOutcome,
    ScriptedConnector,
    SourceDescriptor,
)
from devlens.cron import CronError, parse_cron
from devlens.domain import ValidationError
from devlens.scheduler import (
    FinalStatus,
    JobRun,
    RetryPolicy,
    Scheduler,
    SchedulerState,
    run_job,
)
from devlens.storage import RawRecord, Store

UTC = timezone.utc
NOW = datetime(2024, 3, 10, 12, 0, tzinfo=UTC)
GIT = SourceDescriptor(source_id="git", schedule="0 0 * * *")
POLICY = RetryPolicy(max_attempts=5, base_delay=1.0, multiplier=2.0)


@pytest.fixture
def store(tmp_path):
    s = Store(tmp_path / "store.db")
    yield s
    s.close()


def _ok(n=1):
    records = tuple(
        RawRecord(source_id="git", natural_key=f"k{i}", fetched_at=NOW, payload=f'{{"i":{i}}}')
        for i in range(n)
    )
    return FetchOutcome.success(records, '{"event-ts":null,"blob-keys":[]}')


class TestCron:
    def test_daily_fire(self):
        schedule = parse_cron("0 0 * * *")
        fires = list(
            schedule.fires_between(
                datetime(2024, 3, 9, 23, 30, tzinfo=UTC), datetime(2024, 3, 10, 0, 30, tzinfo=UTC)
            )
        )
        assert fires == [datetime(2024, 3, 10, 0, 0, tzinfo=UTC)]

    def test_hourly_steps(self):
        schedule = parse_cron("15 * * * *")
        fires = list(
            schedule.fires_between(
                datetime(2024, 3, 10, 0, 0, tzinfo=UTC), datetime(2024, 3, 10, 3, 0, tzinfo=UTC)
            )
        )
        assert [f.hour for f in fires] == [0, 1, 2]
        assert all(f.minute == 15 for f in fires)

    def test_step_and_list(self):
        schedule = parse_cron("*/20 9-17 * * 1-5")
        fire = schedule.next_fire(datetime(2024, 3, 9, 12, 0, tzinfo=UTC))  # Saturday
        assert fire == datetime(2024, 3, 11, 9, 0, tzinfo=UTC)  # Monday 09:00

    def test_weekday_sunday_alias(self):
        assert parse_cron("0 0 * * 7").matches(datetime(2024, 3, 10, 0, 0, tzinfo=UTC))

    def test_month_boundary(self):
        schedule = parse_cron("0 0 1 * *")
        fire = schedule.next_fire(datetime(2024, 2, 15, tzinfo=UTC))
        assert fire == datetime(2024, 3, 1, 0, 0, tzinfo=UTC)

    @pytest.mark.parametrize("expr", ["", "* * * *", "61 * * * *", "* * * * 8", "a * * * *"])
    def test_invalid_rejected(self, expr):
        with pytest.raises(CronError):
            parse_cron(expr)


class TestRetryPolicy:
    def test_delays_strictly_increase(self):
        delays = [POLICY.delay(n) for n in range(1, 5)]
        assert delays == [1.0, 2.0, 4.0, 8.0]
        assert all(a < b for a, b in zip(delays, delays[1:]))

    def test_multiplier_must_exceed_one(self):
        with pytest.raises(ValidationError):
            RetryPolicy(multiplier=1.0)


class TestRunJob:
    def test_fails_four_then_succeeds_uses_five_attempts(self, store):
        connector = ScriptedConnector([FetchOutcome.transient("boom")] * 4 + [_ok(2)])
        clock = SimClock(NOW)
        run = run_job(GIT, connector, policy=POLICY, clock=clock, store=store, watermark=None)
        assert run.final_status is FinalStatus.SUCCEEDED
        assert len(run.attempts) == 5
        assert run.records_stored == 2
        # waits between attempts strictly increase
        assert clock.sleeps == [1.0, 2.0, 4.0, 8.0]

    def test_immediate_success_is_one_attempt(self, store):
        run = run_job(
            GIT, ScriptedConnector([_ok(1)]), policy=POLICY, clock=SimClock(NOW),
            store=store, watermark=None,
        )
        assert run.final_status is FinalStatus.SUCCEEDED
        assert len(run.attempts) == 1

    def test_exhaustion_notifies_and_leaves_store_untouched(self, store):
        store.append_raw(
            RawRecord(source_id="git", natural_key="old", fetched_at=NOW, payload="{}")
        )
        before = store.export_lines("raw")
        notifications = []
        connector = ScriptedConnector([FetchOutcome.transient("boom")])
        run = run_job(
            GIT, connector, policy=POLICY, clock=SimClock(NOW), store=store,
            watermark="wm-before", notify=notifications.append,
        )
        assert run.final_status is FinalStatus.EXHAUSTED
        assert len(run.attempts) == 5
        assert run.new_watermark is None
        assert store.export_lines("raw") == before
        assert len(notifications) == 1
        assert notifications[0].kind == "ingestion-failure"
        assert "git" in notifications[0].text

    def test_rate_limit_waits_at_least_retry_after(self, store):
        connector = ScriptedConnector([FetchOutcome.rate_limited(30.0), _ok(1)])
        clock = SimClock(NOW)
        run = run_job(GIT, connector, policy=POLICY, clock=clock, store=store, watermark=None)
        assert run.final_status is FinalStatus.SUCCEEDED
        # first wait honors Retry-After over the 1s backoff
        assert clock.sleeps[0] == 30.0
        assert run.attempts[1].started_at - run.attempts[0].started_at >= timedelta(seconds=30)

    def test_persistent_rate_limit_defers_without_failure_alert(self, store):
        notifications = []
        connector = ScriptedConnector([FetchOutcome.rate_limited(10.0)])
        run = run_job(
            GIT, connector, policy=POLICY, clock=SimClock(NOW), store=store,
            watermark=None, notify=notifications.append,
        )
        assert run.final_status is FinalStatus.RATE_DEFERRED
        assert notifications == []

    def test_connector_exception_treated_as_transient(self, store):
        class Exploding:
            def fetch(self, source, watermark):
                raise RuntimeError("kaput")

        run = run_job(
            GIT, Exploding(), policy=POLICY, clock=SimClock(NOW), store=store, watermark=None
        )
        assert run.final_status is FinalStatus.EXHAUSTED


def _scheduler(store, registry, clock, **kwargs):
    return Scheduler(
        registry, store, policy=POLICY, clock=clock, inline=True, **kwargs
    )


class TestSchedulerTick:
    def _registry(self, schedule="0 0 * * *", script=None):
        registry = ConnectorRegistry()
        source = SourceDescriptor(source_id="git", schedule=schedule)
        registry.register(source, ScriptedConnector(script or [_ok(1)]))
        return registry

    def test_tick_spanning_midnight_starts_one_job(self, store):
        clock = SimClock(datetime(2024, 3, 9, 23, 50, tzinfo=UTC))
        scheduler = _scheduler(store, self._registry(), clock)
        clock.set(datetime(2024, 3, 10, 0, 10, tzinfo=UTC))
        assert scheduler.tick() == ["git"]

    def test_downtime_coalesces_to_one_run(self, store):
        clock = SimClock(datetime(2024, 3, 10, 0, 30, tzinfo=UTC))
        scheduler = _scheduler(store, self._registry(schedule="0 * * * *"), clock)
        clock.advance(3 * 3600)  # three missed hourly firings
        started = scheduler.tick()
        assert started == ["git"]
        assert store.raw_count() == 1

    def test_no_fire_no_job(self, store):
        clock = SimClock(NOW)
        scheduler = _scheduler(store, self._registry(), clock)
        clock.advance(60)
        assert scheduler.tick() == []

    def test_running_source_is_skipped(self, store):
        registry = ConnectorRegistry()
        source = SourceDescriptor(source_id="git", schedule="* * * * *")
        release = threading.Event()
        entered = threading.Event()

        class Blocking:
            def fetch(self, src, watermark):
                entered.set()
                release.wait(timeout=5)
                return _ok(1)

        registry.register(source, Blocking())
        scheduler = Scheduler(
            registry, store, policy=POLICY, clock=Clock(), parallelism=2, inline=False
        )
        first = scheduler.tick(scheduler.state.last_tick + timedelta(minutes=1))
        assert first == ["git"]
        entered.wait(timeout=5)
        second = scheduler.tick(scheduler.state.last_tick + timedelta(minutes=1))
        assert second == []
        assert [s.source_id for s in scheduler.skips] == ["git"]
        release.set()
        scheduler.shutdown()

    def test_watermark_persists_across_restart(self, store, tmp_path):
        state_path = tmp_path / "state.json"
        clock = SimClock(NOW)
        registry = self._registry(schedule="0 0 * * *")
        scheduler = _scheduler(store, registry, clock, state_path=state_path)
        run = scheduler.run_source("git")
        assert run.final_status is FinalStatus.SUCCEEDED
        scheduler.shutdown()

        reloaded = SchedulerState.load(state_path)
        assert reloaded is not None
        assert "git" in reloaded.watermarks

        scheduler2 = _scheduler(store, self._registry(), clock, state_path=state_path)
        assert scheduler2.state.watermarks == reloaded.watermarks

    def test_credential_warning_once_per_day(self, store):
        registry = ConnectorRegistry()
        source = SourceDescriptor(
            source_id="jira", schedule="0 0 * * *",
            credential_expiry=NOW + timedelta(days=2),
        )
        registry.register(source, ScriptedConnector([_ok(0)]))
        clock = SimClock(NOW)
        notifications = []
        scheduler = _scheduler(store, registry, clock, notify=notifications.append)
        clock.advance(60)
        scheduler.tick()
        clock.advance(3600)
        scheduler.tick()
        warnings = [n for n in notifications if n.kind == "credential-expiry"]
        assert len(warnings) == 1
        clock.advance(25 * 3600)
        scheduler.tick()
        warnings = [n for n in notifications if n.kind == "credential-expiry"]
        assert len(warnings) == 2


class TestMutualExclusion:
    def test_same_source_never_overlaps(self, store):
        registry = ConnectorRegistry()
        source = SourceDescriptor(source_id="git", schedule="* * * * *")
        active = []
        lock = threading.Lock()

        class Tracking:
            def fetch(self, src, watermark):
                with lock:
                    active.append(src.source_id)
                    assert active.count(src.source_id) == 1, "overlapping run detected"
                import time

                time.sleep(0.05)
                with lock:
                    active.remove(src.source_id)
                return _ok(0)

        registry.register(source, Tracking())
        scheduler = Scheduler(registry, store, policy=POLICY, clock=Clock(), parallelism=4)
        base = scheduler.state.last_tick
        for i in range(1, 6):
            scheduler.tick(base + timedelta(minutes=i))
        scheduler.shutdown()
