from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from devlens import domain
from devlens.domain import (
    CommitEvent,
    DeploymentEvent,
    Granularity,
    MetricId,
    Outcome,
    PrState,
    PullRequestEvent,
    Scope,
    ValidationError,
    event_to_json,
    format_rfc3339,
    natural_key,
    parse_event,
    parse_event_line,
    parse_rfc3339,
    serialize_event,
    standardize_user_id,
    window_for,
)

UTC = timezone.utc
PLATFORMS = frozenset({"android", "ios", "web"})


class TestStandardizeUserId:
    def test_strips_domain(self):
        assert standardize_user_id("Alice@corp.example") == "alice"

    def test_identity_on_standard_input(self):
        assert standardize_user_id("alice") == "alice"

    def test_trim_fold_strip(self):
        # trim whitespace, case-fold, then drop the email domain
        assert standardize_user_id(" BOB.k@corp.example ") == "bob.k"

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            standardize_user_id("")

    def test_domain_only_rejected(self):
        with pytest.raises(ValidationError):
            standardize_user_id("@corp.example")

    @given(st.text(min_size=1).filter(lambda s: s.strip().split("@", 1)[0].casefold()))
    def test_idempotent(self, raw):
        once = standardize_user_id(raw)
        assert standardize_user_id(once) == once


class TestWindowFor:
    def test_weekly_monday_aligned(self):
        w = window_for(datetime(2024, 3, 6, 15, 0, tzinfo=UTC), Granularity.WEEKLY)
        assert w.start == datetime(2024, 3, 4, tzinfo=UTC)
        assert w.end == datetime(2024, 3, 11, tzinfo=UTC)

    def test_monthly_boundary_inclusion(self):
        w = window_for(datetime(2024, 3, 1, 0, 0, tzinfo=UTC), Granularity.MONTHLY)
        assert w.start == datetime(2024, 3, 1, tzinfo=UTC)
        assert w.end == datetime(2024, 4, 1, tzinfo=UTC)

    def test_daily_leap_day(self):
        w = window_for(datetime(2024, 2, 29, 23, 59, tzinfo=UTC), Granularity.DAILY)
        assert w.start == datetime(2024, 2, 29, tzinfo=UTC)
        assert w.end == datetime(2024, 3, 1, tzinfo=UTC)

    @given(
        st.datetimes(
            min_value=datetime(1990, 1, 1),
            max_value=datetime(2100, 1, 1),
        ).map(lambda d: d.replace(tzinfo=UTC)),
        st.sampled_from(list(Granularity)),
    )
    @settings(max_examples=200)
    def test_total_and_idempotent(self, ts, g):
        w = window_for(ts, g)
        assert w.contains(ts)
        assert window_for(w.start, g) == w

    def test_windows_between_ordered(self):
        wins = domain.windows_between(
            datetime(2024, 2, 27, tzinfo=UTC),
            datetime(2024, 3, 2, tzinfo=UTC),
            Granularity.DAILY,
        )
        assert len(wins) == 5
        assert all(a.end == b.start for a, b in zip(wins, wins[1:]))


class TestScope:
    def test_key_round_trip(self):
        for scope in (
            Scope(),
            Scope(platform="android"),
            Scope(platform="android", team="growth"),
            Scope(team="growth"),
        ):
            assert Scope.parse(scope.key) == scope

    def test_org_flag(self):
        assert Scope().is_org
        assert not Scope(platform="web").is_org

    def test_rejects_uppercase(self):
        with pytest.raises(ValidationError):
            Scope(platform="Android")

    def test_team_scope_excludes_unteamed_events(self):
        commit = CommitEvent(
            commit_id="c1",
            author_id="alice",
            branch="main",
            committed_at=datetime(2024, 3, 4, tzinfo=UTC),
            platform="android",
        )
        assert Scope(platform="android").contains_event(commit)
        assert not Scope(platform="android", team="growth").contains_event(commit)
        assert Scope().contains_event(commit)


class TestSerialization:
    def _commit(self):
        return CommitEvent(
            commit_id="c1",
            author_id="alice",
            branch="main",
            committed_at=datetime(2024, 3, 4, 10, 0, tzinfo=UTC),
            platform="android",
        )

    def test_round_trip(self):
        event = self._commit()
        doc = serialize_event(event)
        assert doc["event-kind"] == "commit"
        assert doc["schema-version"] == 1
        assert doc["committed-at"] == "2024-03-04T10:00:00Z"
        assert parse_event(doc, PLATFORMS) == event

    def test_canonical_json_is_stable(self):
        event = self._commit()
        assert event_to_json(event) == event_to_json(event)
        assert "\n" not in event_to_json(event)

    def test_unknown_platform_rejected(self):
        doc = serialize_event(self._commit())
        doc["platform"] = "amiga"
        with pytest.raises(ValidationError, match="platform"):
            parse_event(doc, PLATFORMS)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError, match="event-kind"):
            parse_event({"event-kind": "meeting", "schema-version": 1}, PLATFORMS)

    def test_wrong_schema_version_rejected(self):
        doc = serialize_event(self._commit())
        doc["schema-version"] = 2
        with pytest.raises(ValidationError, match="schema-version"):
            parse_event(doc, PLATFORMS)

    def test_missing_field_rejected(self):
        doc = serialize_event(self._commit())
        del doc["branch"]
        with pytest.raises(ValidationError, match="branch"):
            parse_event(doc, PLATFORMS)

    def test_extra_field_rejected(self):
        doc = serialize_event(self._commit())
        doc["reviewer"] = "bob"
        with pytest.raises(ValidationError, match="reviewer"):
            parse_event(doc, PLATFORMS)

    def test_parse_line_bad_json(self):
        with pytest.raises(ValidationError, match="JSON"):
            parse_event_line("{nope", PLATFORMS)

    def test_deployment_commit_ids_sorted(self):
        event = DeploymentEvent(
            deploy_id="d1",
            platform="web",
            deployed_at=datetime(2024, 3, 4, tzinfo=UTC),
            commit_ids=frozenset({"z", "a"}),
            outcome=Outcome.SUCCESS,
        )
        assert serialize_event(event)["commit-ids"] == ["a", "z"]
        assert parse_event(serialize_event(event), PLATFORMS) == event


class TestInvariants:
    def test_pr_merged_at_requires_merged_state(self):
        with pytest.raises(ValidationError):
            PullRequestEvent(
                pr_id="p1",
                author_id="alice",
                team="growth",
                platform="web",
                created_at=datetime(2024, 3, 4, tzinfo=UTC),
                merged_at=datetime(2024, 3, 5, tzinfo=UTC),
                state=PrState.OPEN,
            )

    def test_successful_deployment_needs_commits(self):
        with pytest.raises(ValidationError):
            DeploymentEvent(
                deploy_id="d1",
                platform="web",
                deployed_at=datetime(2024, 3, 4, tzinfo=UTC),
                commit_ids=frozenset(),
                outcome=Outcome.SUCCESS,
            )

    def test_rfc3339_z_and_offset_agree(self):
        a = parse_rfc3339("2024-03-04T10:00:00Z")
        b = parse_rfc3339("2024-03-04T12:00:00+02:00")
        assert a == b
        assert format_rfc3339(a) == "2024-03-04T10:00:00Z"

    def test_natural_key_commit_is_platform_scoped(self):
        commit = CommitEvent(
            commit_id="c1",
            author_id="alice",
            branch="main",
            committed_at=datetime(2024, 3, 4, tzinfo=UTC),
            platform="android",
        )
        assert natural_key(commit) == "android:c1"


class TestMetricIds:
    def test_catalog_has_eighteen_entries(self):
        assert len(domain.CATALOG_METRICS) == 18

    def test_value_kinds(self):
        assert domain.value_kind(MetricId.BUG_MIX) is domain.ValueKind.DISTRIBUTION
        assert domain.value_kind(MetricId.AUTOMATION_STATUS) is domain.ValueKind.STATUS_TRIPLE
        assert domain.value_kind(MetricId.MAIN_FAIL_RATE) is domain.ValueKind.NUMBER

    def test_string_form_is_kebab(self):
        assert MetricId.LEAD_TIME_FOR_CHANGES.value == "lead-time-for-changes"
