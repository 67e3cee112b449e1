import threading
from datetime import datetime, timezone

import pytest

from devlens.domain import Granularity, MetricId, Scope, ValidationError, window_for
from devlens.storage import FreshnessStamp, MetricPoint, RawRecord, Store

UTC = timezone.utc
T0 = datetime(2024, 3, 4, 12, 0, tzinfo=UTC)


@pytest.fixture
def store(tmp_path):
    s = Store(tmp_path / "store.db")
    yield s
    s.close()


def _record(key="k1", payload='{"a":1}', source="git", at=T0):
    return RawRecord(source_id=source, natural_key=key, fetched_at=at, payload=payload)


def _point(value=4.0, metric=MetricId.MAIN_FAIL_RATE, scope=Scope(platform="web"),
           at=T0, start=T0, sample=25):
    return MetricPoint(
        metric_id=metric,
        scope=scope,
        window=window_for(start, Granularity.DAILY),
        value=value,
        computed_at=at,
        sample_size=sample,
    )


class TestRawStore:
    def test_append_identical_is_noop(self, store):
        assert store.append_raw(_record()) is True
        assert store.append_raw(_record()) is False
        assert store.raw_count() == 1

    def test_changed_payload_creates_version_latest_wins(self, store):
        store.append_raw(_record(payload='{"a":1}'))
        store.append_raw(_record(payload='{"a":2}'))
        assert store.raw_count() == 2
        latest = store.read_raw("git")
        assert len(latest) == 1
        assert latest[0].record.payload == '{"a":2}'
        assert latest[0].version == 2
        assert len(store.read_raw("git", latest_only=False)) == 2

    def test_empty_key_rejected(self):
        with pytest.raises(ValidationError):
            RawRecord(source_id="git", natural_key="", fetched_at=T0, payload="{}")

    def test_full_range_read(self, store):
        for key in ("a", "b", "c"):
            store.append_raw(_record(key=key))
        assert len(store.read_raw("git")) == 3

    def test_time_range_covering_none(self, store):
        store.append_raw(_record())
        out = store.read_raw("git", fetched_after=datetime(2030, 1, 1, tzinfo=UTC))
        assert out == []

    def test_key_prefix_read(self, store):
        store.append_raw(_record(key="android:c1"))
        store.append_raw(_record(key="ios:c1"))
        assert len(store.read_raw("git", key_prefix="android:")) == 1

    def test_concurrent_appends(self, store):
        def add(n):
            for i in range(20):
                store.append_raw(_record(key=f"k-{n}-{i}"))

        threads = [threading.Thread(target=add, args=(n,)) for n in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert store.raw_count() == 80


class TestProcessedStore:
    def test_upsert_round_trip(self, store):
        point = _point()
        store.upsert_metric(point)
        got = store.query_metric(point.metric_id, point.scope, Granularity.DAILY)
        assert got == [point]

    def test_last_write_wins_and_freshness_advances(self, store):
        store.upsert_metric(_point(value=4.0, at=T0))
        later = T0.replace(hour=14)
        store.upsert_metric(_point(value=8.0, at=later))
        got = store.query_metric(MetricId.MAIN_FAIL_RATE, Scope(platform="web"), Granularity.DAILY)
        assert [p.value for p in got] == [8.0]
        stamp = store.freshness(MetricId.MAIN_FAIL_RATE, Scope(platform="web"))
        assert stamp == FreshnessStamp(MetricId.MAIN_FAIL_RATE, Scope(platform="web"), later)

    def test_kind_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            MetricPoint(
                metric_id=MetricId.BUG_MIX,
                scope=Scope(platform="web"),
                window=window_for(T0, Granularity.DAILY),
                value=4.0,
                computed_at=T0,
                sample_size=1,
            )

    def test_triple_requires_exact_fields(self):
        with pytest.raises(ValidationError):
            MetricPoint(
                metric_id=MetricId.AUTOMATION_STATUS,
                scope=Scope(platform="web"),
                window=window_for(T0, Granularity.DAILY),
                value={"automated": 1},
                computed_at=T0,
                sample_size=1,
            )

    def test_query_empty_store(self, store):
        assert store.query_metric(MetricId.MAU, Scope(platform="web"), Granularity.MONTHLY) == []

    def test_query_ordered_and_range_filtered(self, store):
        days = [T0.replace(day=d) for d in (6, 4, 5)]
        for d in days:
            store.upsert_metric(_point(start=d, value=float(d.day)))
        got = store.query_metric(MetricId.MAIN_FAIL_RATE, Scope(platform="web"), Granularity.DAILY)
        assert [p.value for p in got] == [4.0, 5.0, 6.0]
        none = store.query_metric(
            MetricId.MAIN_FAIL_RATE,
            Scope(platform="web"),
            Granularity.DAILY,
            start=datetime(2024, 4, 1, tzinfo=UTC),
        )
        assert none == []

    def test_freshness_is_max_over_scope(self, store):
        store.upsert_metric(_point(start=T0, at=T0.replace(hour=15)))
        store.upsert_metric(_point(start=T0.replace(day=5), at=T0))
        stamp = store.freshness(MetricId.MAIN_FAIL_RATE, Scope(platform="web"))
        assert stamp.last_updated == T0.replace(hour=15)


class TestExport:
    def test_export_is_deterministic(self, store):
        store.append_raw(_record())
        store.upsert_metric(_point())
        assert store.export_lines("raw") == store.export_lines("raw")
        assert store.export_lines("processed") == store.export_lines("processed")
        assert len(store.export_lines("raw")) == 1

    def test_clear_processed_leaves_raw(self, store):
        store.append_raw(_record())
        store.upsert_metric(_point())
        store.clear_processed()
        assert store.processed_count() == 0
        assert store.raw_count() == 1

    def test_unknown_namespace(self, store):
        with pytest.raises(ValidationError):
            store.export_lines("shadow")
