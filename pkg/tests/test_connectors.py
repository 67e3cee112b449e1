import tempfile
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from devlens.clock import SimClock
from devlens.connectors import (
    ConnectorRegistry,
    ConnectorError,
    FetchOutcome,
    FetchStatus,
    FixtureConnector,
    HttpConnector,
    ScriptedConnector,
    SourceDescriptor,
    check_credentials,
)
from devlens.domain import CommitEvent, ValidationError, event_to_json, parse_rfc3339

UTC = timezone.utc
PLATFORMS = frozenset({"android", "web"})
NOW = datetime(2024, 3, 10, tzinfo=UTC)


def _commit(i, at):
    return CommitEvent(
        commit_id=f"c{i}",
        author_id="alice",
        branch="main",
        committed_at=at,
        platform="android",
    )


def _write_fixture(root: Path, source: str, name: str, events):
    source_dir = root / source
    source_dir.mkdir(parents=True, exist_ok=True)
    path = source_dir / f"{name}.jsonl"
    path.write_text("".join(event_to_json(e) + "\n" for e in events), encoding="utf-8")


GIT = SourceDescriptor(source_id="git", schedule="0 0 * * *")


class TestFixtureConnector:
    def test_initial_fetch_returns_all_with_max_watermark(self, tmp_path):
        times = [NOW + timedelta(hours=h) for h in (1, 2, 3)]
        for i, at in enumerate(times):
            _write_fixture(tmp_path, "git", f"file{i}", [_commit(i, at)])
        connector = FixtureConnector(tmp_path, PLATFORMS, clock=SimClock(NOW))
        outcome = connector.fetch(GIT, None)
        assert outcome.status is FetchStatus.SUCCESS
        assert len(outcome.records) == 3
        assert all(r.source_id == "git" for r in outcome.records)
        # watermark carries the newest committed-at
        import json

        assert parse_rfc3339(json.loads(outcome.new_watermark)["event-ts"]) == max(times)

    def test_refetch_at_watermark_returns_nothing(self, tmp_path):
        _write_fixture(tmp_path, "git", "a", [_commit(1, NOW)])
        connector = FixtureConnector(tmp_path, PLATFORMS, clock=SimClock(NOW))
        first = connector.fetch(GIT, None)
        second = connector.fetch(GIT, first.new_watermark)
        assert second.status is FetchStatus.SUCCESS
        assert second.records == ()

    def test_missing_fixture_root_is_permanent(self, tmp_path):
        connector = FixtureConnector(tmp_path / "absent", PLATFORMS)
        outcome = connector.fetch(GIT, None)
        assert outcome.status is FetchStatus.PERMANENT_FAILURE

    def test_unparseable_line_kept_as_blob_once(self, tmp_path):
        source_dir = tmp_path / "git"
        source_dir.mkdir()
        (source_dir / "mixed.jsonl").write_text(
            event_to_json(_commit(1, NOW)) + "\n" + "not json at all\n", encoding="utf-8"
        )
        connector = FixtureConnector(tmp_path, PLATFORMS, clock=SimClock(NOW))
        first = connector.fetch(GIT, None)
        assert len(first.records) == 2
        blob = [r for r in first.records if r.natural_key == "mixed.jsonl:2"]
        assert blob and blob[0].payload == "not json at all"
        second = connector.fetch(GIT, first.new_watermark)
        assert second.records == ()

    @settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(
        batches=st.lists(
            st.lists(st.integers(min_value=0, max_value=5000), min_size=0, max_size=8),
            min_size=1,
            max_size=4,
        )
    )
    def test_watermark_monotonicity(self, batches):
        # repeated fetches over a growing fixture set never return a record twice
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            connector = FixtureConnector(root, PLATFORMS, clock=SimClock(NOW))
            watermark = None
            seen = set()
            counter = 0
            for batch_no, batch in enumerate(batches):
                events = []
                for offset in batch:
                    counter += 1
                    events.append(_commit(counter, NOW + timedelta(minutes=offset)))
                _write_fixture(root, "git", f"batch{batch_no:03d}", events)
                outcome = connector.fetch(GIT, watermark)
                assert outcome.status is FetchStatus.SUCCESS
                for record in outcome.records:
                    key = (record.natural_key, record.payload)
                    assert key not in seen
                    seen.add(key)
                watermark = outcome.new_watermark

    def test_pure_given_same_inputs(self, tmp_path):
        _write_fixture(tmp_path, "git", "a", [_commit(1, NOW), _commit(2, NOW + timedelta(hours=1))])
        connector = FixtureConnector(tmp_path, PLATFORMS, clock=SimClock(NOW))
        a = connector.fetch(GIT, None)
        b = connector.fetch(GIT, None)
        assert [r.payload for r in a.records] == [r.payload for r in b.records]
        assert a.new_watermark == b.new_watermark


class TestScriptedConnector:
    def test_echoes_rate_limit(self):
        connector = ScriptedConnector([FetchOutcome.rate_limited(30.0)])
        outcome = connector.fetch(GIT, None)
        assert outcome.status is FetchStatus.RATE_LIMITED
        assert outcome.retry_after == 30.0

    def test_negative_retry_after_rejected(self):
        with pytest.raises(ValidationError):
            FetchOutcome.rate_limited(-1.0)

    def test_empty_script_rejected(self):
        with pytest.raises(ConnectorError):
            ScriptedConnector([])


class TestCheckCredentials:
    def test_within_horizon_warns(self):
        source = SourceDescriptor("jira", "0 0 * * *", credential_expiry=NOW + timedelta(days=2))
        warning = check_credentials(source, NOW, timedelta(days=7))
        assert warning is not None
        assert "jira" in warning.message()

    def test_outside_horizon_silent(self):
        source = SourceDescriptor("jira", "0 0 * * *", credential_expiry=NOW + timedelta(days=30))
        assert check_credentials(source, NOW, timedelta(days=7)) is None

    def test_no_expiry_silent(self):
        source = SourceDescriptor("jira", "0 0 * * *")
        assert check_credentials(source, NOW, timedelta(days=7)) is None


class TestHttpConnector:
    def test_success_parses_ndjson(self, stub_server):
        body = event_to_json(_commit(1, NOW)) + "\n" + event_to_json(_commit(2, NOW + timedelta(hours=1)))
        stub_server.enqueue(200, body=body)
        connector = HttpConnector(stub_server.url, PLATFORMS, token="s3cret", clock=SimClock(NOW))
        outcome = connector.fetch(SourceDescriptor("api", "0 * * * *"), None)
        assert outcome.status is FetchStatus.SUCCESS
        assert len(outcome.records) == 2
        sent = stub_server.requests[0]
        assert sent["headers"].get("Authorization") == "Bearer s3cret"

    def test_retry_after_header_respected(self, stub_server):
        stub_server.enqueue(429, headers={"Retry-After": "30"})
        connector = HttpConnector(stub_server.url, PLATFORMS, clock=SimClock(NOW))
        outcome = connector.fetch(SourceDescriptor("api", "0 * * * *"), None)
        assert outcome.status is FetchStatus.RATE_LIMITED
        assert outcome.retry_after == 30.0

    def test_auth_failure_is_permanent(self, stub_server):
        stub_server.enqueue(401)
        connector = HttpConnector(stub_server.url, PLATFORMS)
        outcome = connector.fetch(SourceDescriptor("api", "0 * * * *"), None)
        assert outcome.status is FetchStatus.PERMANENT_FAILURE

    def test_server_error_is_transient(self, stub_server):
        stub_server.enqueue(500)
        connector = HttpConnector(stub_server.url, PLATFORMS)
        outcome = connector.fetch(SourceDescriptor("api", "0 * * * *"), None)
        assert outcome.status is FetchStatus.TRANSIENT_FAILURE

    def test_connection_refused_is_transient(self):
        connector = HttpConnector("http://127.0.0.1:1", PLATFORMS, timeout=0.5)
        outcome = connector.fetch(SourceDescriptor("api", "0 * * * *"), None)
        assert outcome.status is FetchStatus.TRANSIENT_FAILURE

    def test_watermark_passed_as_since_param(self, stub_server):
        stub_server.enqueue(200, body="")
        connector = HttpConnector(stub_server.url, PLATFORMS, clock=SimClock(NOW))
        connector.fetch(SourceDescriptor("api", "0 * * * *"), '{"event-ts":null,"blob-keys":[]}')
        assert "since=" in stub_server.requests[0]["path"]


class TestRegistry:
    def test_duplicate_source_rejected(self):
        registry = ConnectorRegistry()
        registry.register(GIT, ScriptedConnector([FetchOutcome.success([], None)]))
        with pytest.raises(ConnectorError):
            registry.register(GIT, ScriptedConnector([FetchOutcome.success([], None)]))

    def test_lookup(self):
        registry = ConnectorRegistry()
        connector = ScriptedConnector([FetchOutcome.success([], None)])
        registry.register(GIT, connector)
        assert registry.get("git") == (GIT, connector)
        assert "git" in registry
        with pytest.raises(ConnectorError):
            registry.get("nope")
