import json
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from devlens.alerting import (
    AlertEvent,
    AlertRule,
    Comparator,
    FileSink,
    Notification,
    Notifier,
    SinkError,
    StdoutSink,
    WebhookSink,
    evaluate,
    notify,
)
from devlens.domain import (
    Granularity,
    MetricId,
    Scope,
    ScopeSelector,
    ValidationError,
    window_for,
)
from devlens.storage import MetricPoint

UTC = timezone.utc
NOW = datetime(2024, 3, 10, 12, 0, tzinfo=UTC)


def _point(value, metric=MetricId.USER_CRASH_RATE, platform="android", day=10):
    return MetricPoint(
        metric_id=metric,
        scope=Scope(platform=platform),
        window=window_for(datetime(2024, 3, day, tzinfo=UTC), Granularity.DAILY),
        value=value,
        computed_at=NOW,
        sample_size=100,
    )


def _rule(comparator=Comparator.GT, threshold=5.0, cooldown_hours=24, rule_id="crash-high"):
    return AlertRule(
        rule_id=rule_id,
        metric_id=MetricId.USER_CRASH_RATE,
        scope_selector=ScopeSelector(),
        comparator=comparator,
        threshold=threshold,
        channel="quality",
        cooldown=timedelta(hours=cooldown_hours),
    )


class TestEvaluate:
    def test_crash_rate_above_threshold_fires(self):
        events, history = evaluate([_point(6.0)], [_rule()], {}, NOW)
        assert len(events) == 1
        assert events[0].point.value == 6.0
        assert history["crash-high"] == NOW

    def test_boundary_is_strict_for_gt(self):
        events, _ = evaluate([_point(5.0)], [_rule()], {}, NOW)
        assert events == []

    def test_two_breaches_within_cooldown_fire_once(self):
        points = [_point(6.0, day=10), _point(7.0, day=11)]
        events, _ = evaluate(points, [_rule()], {}, NOW)
        assert len(events) == 1

    def test_prior_fire_within_cooldown_suppresses(self):
        history = {"crash-high": NOW - timedelta(hours=2)}
        events, new_history = evaluate([_point(6.0)], [_rule()], history, NOW)
        assert events == []
        assert new_history == history

    def test_fire_after_cooldown_expiry(self):
        history = {"crash-high": NOW - timedelta(hours=25)}
        events, _ = evaluate([_point(6.0)], [_rule()], history, NOW)
        assert len(events) == 1

    def test_scope_selector_filters(self):
        rule = AlertRule(
            rule_id="android-only",
            metric_id=MetricId.USER_CRASH_RATE,
            scope_selector=ScopeSelector(platform="android"),
            comparator=Comparator.GT,
            threshold=5.0,
            channel="quality",
        )
        events, _ = evaluate([_point(9.0, platform="web")], [rule], {}, NOW)
        assert events == []

    def test_non_numeric_metric_rejected_at_rule_construction(self):
        with pytest.raises(ValidationError):
            AlertRule(
                rule_id="bad",
                metric_id=MetricId.BUG_MIX,
                scope_selector=ScopeSelector(),
                comparator=Comparator.GT,
                threshold=1.0,
                channel="quality",
            )

    def test_alert_event_requires_real_breach(self):
        with pytest.raises(ValidationError):
            AlertEvent(rule=_rule(), point=_point(1.0), fired_at=NOW)

    @settings(max_examples=200)
    @given(
        values=st.lists(
            st.floats(min_value=0, max_value=100, allow_nan=False), min_size=0, max_size=6
        ),
        threshold=st.floats(min_value=0, max_value=100, allow_nan=False),
        comparator=st.sampled_from(list(Comparator)),
        cooldown_hours=st.integers(min_value=0, max_value=48),
    )
    def test_no_false_fires(self, values, threshold, comparator, cooldown_hours):
        import operator as op

        compare = {"gt": op.gt, "ge": op.ge, "lt": op.lt, "le": op.le}[comparator.value]
        points = [_point(v, day=10 + i) for i, v in enumerate(values)]
        rule = _rule(comparator=comparator, threshold=threshold, cooldown_hours=cooldown_hours)
        events, _ = evaluate(points, [rule], {}, NOW)
        for event in events:
            assert compare(event.point.value, threshold)

    @settings(max_examples=100)
    @given(
        breach_offsets=st.lists(st.integers(min_value=0, max_value=200), min_size=1, max_size=20),
        cooldown_hours=st.integers(min_value=1, max_value=48),
    )
    def test_cooldown_spacing_over_replays(self, breach_offsets, cooldown_hours):
        rule = _rule(cooldown_hours=cooldown_hours)
        history = {}
        fire_times = []
        for offset in sorted(breach_offsets):
            at = NOW + timedelta(hours=offset)
            events, history = evaluate([_point(50.0)], [rule], history, at)
            fire_times.extend(e.fired_at for e in events)
        gaps = [b - a for a, b in zip(fire_times, fire_times[1:])]
        assert all(gap >= timedelta(hours=cooldown_hours) for gap in gaps)


class TestSinks:
    def test_file_sink_line_contract(self, tmp_path):
        path = tmp_path / "alerts.log"
        event = AlertEvent(rule=_rule(), point=_point(6.0), fired_at=NOW)
        notify(event.to_notification(), FileSink(path), channel="quality")
        line = path.read_text().strip()
        doc = json.loads(line)
        assert doc["rule-id"] == "crash-high"
        assert doc["metric-id"] == "user-crash-rate"
        assert doc["value"] == 6.0
        assert doc["threshold"] == 5.0

    def test_webhook_sink_posts_flat_body(self, stub_server):
        stub_server.enqueue(200)
        event = AlertEvent(rule=_rule(), point=_point(6.0), fired_at=NOW)
        result = notify(event.to_notification(), WebhookSink(stub_server.url), channel="quality")
        assert result.delivered
        body = json.loads(stub_server.requests[0]["body"])
        assert set(body) == {
            "rule-id", "metric-id", "scope", "window", "value", "threshold", "fired-at",
        }
        assert body["scope"] == "platform:android"
        assert "/" in body["window"]

    def test_stdout_sink(self, capsys):
        StdoutSink().deliver(Notification(kind="alert", text="hello", body={}))
        assert "hello" in capsys.readouterr().out

    def test_failed_delivery_retried_once_then_recorded(self):
        calls = []

        class FailingSink:
            def deliver(self, notification):
                calls.append(1)
                raise SinkError("down")

        result = notify(Notification(kind="alert", text="x", body={}), FailingSink())
        assert not result.delivered
        assert result.attempts == 2
        assert len(calls) == 2

    def test_unknown_channel_rejected(self):
        notifier = Notifier({"quality": StdoutSink()})
        with pytest.raises(ValidationError, match="ops"):
            notifier.send("ops", Notification(kind="alert", text="x", body={}))

    def test_webhook_unreachable_does_not_raise(self):
        result = notify(
            Notification(kind="alert", text="x", body={}),
            WebhookSink("http://127.0.0.1:1", timeout=0.2),
        )
        assert not result.delivered
