"""Normalized event vocabulary, scopes, time windows, and metric identities.

Everything downstream (connectors, storage, metrics, APIs) speaks in the
types defined here. All timestamps are UTC; the canonical serialized form
is one JSON object per event with kebab-case field names and "event-kind"
and "schema-version" discriminators.
"""

from __future__ import annotations

import calendar
import json
import re
from dataclasses import dataclass, fields
from datetime import date, datetime, timedelta, timezone
from enum import Enum
from typing import Any, Union

SCHEMA_VERSION = 1

UTC = timezone.utc

_LABEL_RE = re.compile(r"^[a-z0-9][a-z0-9._-]*$")


class ValidationError(ValueError):
    """Raised when a value violates a domain invariant."""


# ---------------------------------------------------------------------------
# Timestamps
# ---------------------------------------------------------------------------

def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC 3339 timestamp into a UTC-normalized aware datetime."""
    if not isinstance(value, str) or not value:
        raise ValidationError(f"not a timestamp: {value!r}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ValidationError(f"invalid RFC 3339 timestamp: {value!r}") from exc
    if parsed.tzinfo is None:
        raise ValidationError(f"timestamp missing UTC offset: {value!r}")
    return parsed.astimezone(UTC)


def format_rfc3339(value: datetime) -> str:
    """Render a UTC datetime as an RFC 3339 string with a Z suffix."""
    if value.tzinfo is None:
        raise ValidationError("naive datetime cannot be serialized")
    value = value.astimezone(UTC)
    if value.microsecond:
        return value.strftime("%Y-%m-%dT%H:%M:%S.%f") + "Z"
    return value.strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_date(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"invalid date: {value!r}") from exc


_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def parse_month(value: str) -> str:
    """Validate a "YYYY-MM" month label and return it unchanged."""
    match = _MONTH_RE.match(value) if isinstance(value, str) else None
    if not match or not 1 <= int(match.group(2)) <= 12:
        raise ValidationError(f"invalid month: {value!r}")
    return value


def month_start(month: str) -> datetime:
    year, mon = (int(part) for part in parse_month(month).split("-"))
    return datetime(year, mon, 1, tzinfo=UTC)


# ---------------------------------------------------------------------------
# Scope
# ---------------------------------------------------------------------------

def _check_label(value: str, what: str) -> str:
    if not isinstance(value, str) or not _LABEL_RE.match(value):
        raise ValidationError(f"{what} label must be non-empty lowercase: {value!r}")
    return value


@dataclass(frozen=True, slots=True)
class Scope:
    """Aggregation scope: a platform, a team within it, or the whole org.

    Scopes identify groups, never individuals; labels are validated to the
    lowercase label grammar and the platform set is closed by configuration.
    """

    platform: str | None = None
    team: str | None = None

    def __post_init__(self) -> None:
        if self.platform is not None:
            _check_label(self.platform, "platform")
        if self.team is not None:
            _check_label(self.team, "team")

    @property
    def is_org(self) -> bool:
        return self.platform is None and self.team is None

    @property
    def key(self) -> str:
        if self.is_org:
            return "org"
        parts = []
        if self.platform is not None:
            parts.append(f"platform:{self.platform}")
        if self.team is not None:
            parts.append(f"team:{self.team}")
        return ",".join(parts)

    @classmethod
    def parse(cls, text: str) -> "Scope":
        if text == "org":
            return cls()
        platform = team = None
        for part in text.split(","):
            name, sep, value = part.partition(":")
            if not sep or name not in ("platform", "team"):
                raise ValidationError(f"invalid scope: {text!r}")
            if name == "platform":
                platform = value
            else:
                team = value
        return cls(platform=platform, team=team)

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {}
        if self.platform is not None:
            doc["platform"] = self.platform
        if self.team is not None:
            doc["team"] = self.team
        return doc

    def contains_event(self, event: "Event") -> bool:
        """Whether an event belongs to this scope.

        Org contains everything; team scopes only contain events that carry
        a team attribution (events without one are excluded, not promoted).
        """
        if self.platform is not None and event.platform != self.platform:
            return False
        if self.team is not None and getattr(event, "team", None) != self.team:
            return False
        return True


ORG_SCOPE = Scope()


@dataclass(frozen=True, slots=True)
class ScopeSelector:
    """Pattern over scopes: each field is "*" (any), a literal, or None (absent).

    Used by alert rules to pick which scopes a threshold applies to and by
    roles to bound what a principal may read.
    """

    platform: str | None = "*"
    team: str | None = "*"

    def __post_init__(self) -> None:
        for value in (self.platform, self.team):
            if value is not None and value != "*":
                _check_label(value, "selector")

    @staticmethod
    def _field_matches(pattern: str | None, value: str | None) -> bool:
        if pattern == "*":
            return True
        return pattern == value

    def matches(self, scope: Scope) -> bool:
        return self._field_matches(self.platform, scope.platform) and self._field_matches(
            self.team, scope.team
        )

    @classmethod
    def from_json(cls, doc: Any) -> "ScopeSelector":
        if doc == "*":
            return cls()
        if not isinstance(doc, dict) or not set(doc) <= {"platform", "team"}:
            raise ValidationError(f"invalid scope selector: {doc!r}")
        return cls(platform=doc.get("platform", "*"), team=doc.get("team", "*"))

    def to_json(self) -> dict[str, Any]:
        return {"platform": self.platform, "team": self.team}


# ---------------------------------------------------------------------------
# Time windows
# ---------------------------------------------------------------------------

class Granularity(str, Enum):
    DAILY = "daily"
    WEEKLY = "weekly"
    MONTHLY = "monthly"


def _floor_to_window(ts: datetime, granularity: Granularity) -> datetime:
    ts = ts.astimezone(UTC)
    day = ts.date()
    if granularity is Granularity.DAILY:
        start = day
    elif granularity is Granularity.WEEKLY:
        start = day - timedelta(days=day.weekday())
    else:
        start = day.replace(day=1)
    return datetime(start.year, start.month, start.day, tzinfo=UTC)


def _next_boundary(start: datetime, granularity: Granularity) -> datetime:
    if granularity is Granularity.DAILY:
        return start + timedelta(days=1)
    if granularity is Granularity.WEEKLY:
        return start + timedelta(days=7)
    days = calendar.monthrange(start.year, start.month)[1]
    return start + timedelta(days=days)


@dataclass(frozen=True, slots=True)
class TimeWindow:
    """Half-open interval [start, end) aligned to its granularity.

    Daily windows start at 00:00 UTC, weekly windows on Monday 00:00 UTC,
    monthly windows on the 1st 00:00 UTC.
    """

    start: datetime
    end: datetime
    granularity: Granularity

    def __post_init__(self) -> None:
        if self.start.tzinfo is None or self.end.tzinfo is None:
            raise ValidationError("window bounds must be timezone-aware")
        if self.start >= self.end:
            raise ValidationError("window start must precede end")
        if self.start != _floor_to_window(self.start, self.granularity):
            raise ValidationError(
                f"window start {format_rfc3339(self.start)} not aligned to {self.granularity.value}"
            )
        if self.end != _next_boundary(self.start, self.granularity):
            raise ValidationError(
                f"window end {format_rfc3339(self.end)} not one {self.granularity.value} step after start"
            )

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts.astimezone(UTC) < self.end

    @property
    def days(self) -> float:
        return (self.end - self.start) / timedelta(days=1)


def window_for(ts: datetime, granularity: Granularity) -> TimeWindow:
    """Return the unique window of the given granularity containing ts."""
    start = _floor_to_window(ts, granularity)
    return TimeWindow(start=start, end=_next_boundary(start, granularity), granularity=granularity)


def windows_between(first: datetime, last: datetime, granularity: Granularity) -> list[TimeWindow]:
    """All windows touching the inclusive span [first, last], in order."""
    if first > last:
        return []
    out = [window_for(first, granularity)]
    while not out[-1].contains(last):
        start = out[-1].end
        out.append(TimeWindow(start=start, end=_next_boundary(start, granularity), granularity=granularity))
    return out


# ---------------------------------------------------------------------------
# User id standardization
# ---------------------------------------------------------------------------

def standardize_user_id(raw_id: str) -> str:
    """Canonicalize a user id: trim, case-fold, strip any email domain.

    Idempotent; raises ValidationError on empty input or an id that is
    empty once canonicalized.
    """
    if not isinstance(raw_id, str) or not raw_id:
        raise ValidationError("user id must be a non-empty string")
    local = raw_id.strip().split("@", 1)[0].casefold()
    if not local:
        raise ValidationError(f"user id has no local part: {raw_id!r}")
    return local


# ---------------------------------------------------------------------------
# Event variants
# ---------------------------------------------------------------------------

class EventKind(str, Enum):
    COMMIT = "commit"
    PULL_REQUEST = "pull-request"
    BUILD = "build"
    DEPLOYMENT = "deployment"
    ISSUE = "issue"
    SESSION_STATS = "session-stats"
    TEST_SUITE_RUN = "test-suite-run"
    COVERAGE = "coverage"
    USAGE_STATS = "usage-stats"
    ASSISTANT_USAGE = "assistant-usage"


class PrState(str, Enum):
    OPEN = "open"
    MERGED = "merged"
    CLOSED_UNMERGED = "closed-unmerged"


class TriggerKind(str, Enum):
    PR_FEEDBACK = "pr-feedback"
    MAIN = "main"
    RELEASE = "release"


class Outcome(str, Enum):
    SUCCESS = "success"
    FAILURE = "failure"


class IssueKind(str, Enum):
    BUG = "bug"
    STORY = "story"
    TASK = "task"


class Priority(str, Enum):
    BLOCKER = "blocker"
    CRITICAL = "critical"
    MAJOR = "major"
    NORMAL = "normal"
    MINOR = "minor"


class IssueStatus(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


class AutomationStatus(str, Enum):
    TO_BE_AUTOMATED = "to-be-automated"
    AUTOMATED = "automated"
    CANNOT_AUTOMATE = "cannot-automate"


def _check_count(value: Any, what: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ValidationError(f"{what} must be a non-negative integer: {value!r}")
    return value


def _check_nonempty(value: Any, what: str) -> str:
    if not isinstance(value, str) or not value:
        raise ValidationError(f"{what} must be a non-empty string")
    return value


@dataclass(frozen=True, slots=True)
class CommitEvent:
    commit_id: str
    author_id: str
    branch: str
    committed_at: datetime
    platform: str

    def __post_init__(self) -> None:
        _check_nonempty(self.commit_id, "commit-id")
        _check_nonempty(self.author_id, "author-id")
        _check_nonempty(self.branch, "branch")
        _check_label(self.platform, "platform")


@dataclass(frozen=True, slots=True)
class PullRequestEvent:
    pr_id: str
    author_id: str
    team: str
    platform: str
    created_at: datetime
    merged_at: datetime | None
    state: PrState

    def __post_init__(self) -> None:
        _check_nonempty(self.pr_id, "pr-id")
        _check_nonempty(self.author_id, "author-id")
        _check_label(self.team, "team")
        _check_label(self.platform, "platform")
        if (self.merged_at is not None) != (self.state is PrState.MERGED):
            raise ValidationError("merged-at present iff state is merged")
        if self.merged_at is not None and self.merged_at < self.created_at:
            raise ValidationError("merged-at precedes created-at")


@dataclass(frozen=True, slots=True)
class BuildEvent:
    build_id: str
    platform: str
    branch: str
    is_main_branch: bool
    trigger_kind: TriggerKind
    pr_id: str | None
    triggered_at: datetime
    finished_at: datetime
    outcome: Outcome

    def __post_init__(self) -> None:
        _check_nonempty(self.build_id, "build-id")
        _check_label(self.platform, "platform")
        _check_nonempty(self.branch, "branch")
        if self.finished_at < self.triggered_at:
            raise ValidationError("finished-at precedes triggered-at")


@dataclass(frozen=True, slots=True)
class DeploymentEvent:
    deploy_id: str
    platform: str
    deployed_at: datetime
    commit_ids: frozenset[str]
    outcome: Outcome

    def __post_init__(self) -> None:
        _check_nonempty(self.deploy_id, "deploy-id")
        _check_label(self.platform, "platform")
        if self.outcome is Outcome.SUCCESS and not self.commit_ids:
            raise ValidationError("successful deployment must include commit-ids")


@dataclass(frozen=True, slots=True)
class IssueEvent:
    issue_id: str
    platform: str
    kind: IssueKind
    priority: Priority
    status: IssueStatus
    automation_status: AutomationStatus | None
    opened_at: datetime
    closed_at: datetime | None
    snapshot_at: datetime

    def __post_init__(self) -> None:
        _check_nonempty(self.issue_id, "issue-id")
        _check_label(self.platform, "platform")
        if (self.closed_at is not None) != (self.status is IssueStatus.CLOSED):
            raise ValidationError("closed-at present iff status is closed")
        if self.snapshot_at < self.opened_at:
            raise ValidationError("snapshot-at precedes opened-at")


@dataclass(frozen=True, slots=True)
class SessionStatsEvent:
    platform: str
    day: date
    total_sessions: int
    crashed_sessions: int
    total_users: int
    crash_free_users: int

    def __post_init__(self) -> None:
        _check_label(self.platform, "platform")
        for name in ("total_sessions", "crashed_sessions", "total_users", "crash_free_users"):
            _check_count(getattr(self, name), name.replace("_", "-"))
        if self.crashed_sessions > self.total_sessions:
            raise ValidationError("crashed-sessions exceeds total-sessions")
        if self.crash_free_users > self.total_users:
            raise ValidationError("crash-free-users exceeds total-users")


@dataclass(frozen=True, slots=True)
class TestSuiteRunEvent:
    run_id: str
    platform: str
    ran_at: datetime
    suites_total: int
    suites_passed: int

    def __post_init__(self) -> None:
        _check_nonempty(self.run_id, "run-id")
        _check_label(self.platform, "platform")
        _check_count(self.suites_total, "suites-total")
        _check_count(self.suites_passed, "suites-passed")
        if self.suites_passed > self.suites_total:
            raise ValidationError("suites-passed exceeds suites-total")


@dataclass(frozen=True, slots=True)
class CoverageEvent:
    platform: str
    measured_at: datetime
    statements_total: int
    statements_covered: int

    def __post_init__(self) -> None:
        _check_label(self.platform, "platform")
        _check_count(self.statements_total, "statements-total")
        _check_count(self.statements_covered, "statements-covered")
        if self.statements_covered > self.statements_total:
            raise ValidationError("statements-covered exceeds statements-total")


@dataclass(frozen=True, slots=True)
class UsageStatsEvent:
    platform: str
    month: str
    active_users: int

    def __post_init__(self) -> None:
        _check_label(self.platform, "platform")
        parse_month(self.month)
        _check_count(self.active_users, "active-users")


@dataclass(frozen=True, slots=True)
class AssistantUsageEvent:
    platform: str
    day: date
    suggestions_shown: int
    suggestions_accepted: int
    suggestions_declined: int
    lines_generated: int

    def __post_init__(self) -> None:
        _check_label(self.platform, "platform")
        for name in (
            "suggestions_shown",
            "suggestions_accepted",
            "suggestions_declined",
            "lines_generated",
        ):
            _check_count(getattr(self, name), name.replace("_", "-"))
        if self.suggestions_accepted + self.suggestions_declined > self.suggestions_shown:
            raise ValidationError("accepted + declined exceeds suggestions-shown")


Event = Union[
    CommitEvent,
    PullRequestEvent,
    BuildEvent,
    DeploymentEvent,
    IssueEvent,
    SessionStatsEvent,
    TestSuiteRunEvent,
    CoverageEvent,
    UsageStatsEvent,
    AssistantUsageEvent,
]

_KIND_TO_TYPE: dict[EventKind, type] = {
    EventKind.COMMIT: CommitEvent,
    EventKind.PULL_REQUEST: PullRequestEvent,
    EventKind.BUILD: BuildEvent,
    EventKind.DEPLOYMENT: DeploymentEvent,
    EventKind.ISSUE: IssueEvent,
    EventKind.SESSION_STATS: SessionStatsEvent,
    EventKind.TEST_SUITE_RUN: TestSuiteRunEvent,
    EventKind.COVERAGE: CoverageEvent,
    EventKind.USAGE_STATS: UsageStatsEvent,
    EventKind.ASSISTANT_USAGE: AssistantUsageEvent,
}

_TYPE_TO_KIND = {cls: kind for kind, cls in _KIND_TO_TYPE.items()}


def event_kind(event: Event) -> EventKind:
    return _TYPE_TO_KIND[type(event)]


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------

def _field_to_json(value: Any) -> Any:
    if isinstance(value, datetime):
        return format_rfc3339(value)
    if isinstance(value, date):
        return value.isoformat()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, frozenset):
        return sorted(value)
    return value


def serialize_event(event: Event) -> dict[str, Any]:
    """Render an event in its canonical JSON-object form."""
    doc: dict[str, Any] = {
        "event-kind": event_kind(event).value,
        "schema-version": SCHEMA_VERSION,
    }
    for f in fields(event):
        value = _field_to_json(getattr(event, f.name))
        if value is None:
            continue
        doc[f.name.replace("_", "-")] = value
    return doc


def event_to_json(event: Event) -> str:
    """Canonical single-line JSON text for an event (stable byte form)."""
    return json.dumps(serialize_event(event), sort_keys=True, separators=(",", ":"))


_DATETIME_FIELDS = {
    "committed_at", "created_at", "merged_at", "triggered_at", "finished_at",
    "deployed_at", "opened_at", "closed_at", "snapshot_at", "ran_at", "measured_at",
}
_OPTIONAL_FIELDS = {"merged_at", "pr_id", "closed_at", "automation_status"}
_ENUM_FIELDS = {
    "state": PrState,
    "trigger_kind": TriggerKind,
    "outcome": Outcome,
    "kind": IssueKind,
    "priority": Priority,
    "status": IssueStatus,
    "automation_status": AutomationStatus,
}


def parse_event(doc: dict[str, Any], platforms: frozenset[str] | set[str]) -> Event:
    """Parse one canonical JSON object into a validated event.

    Rejects unknown event kinds, schema versions, platforms outside the
    configured set, missing or extra fields, and invariant violations.
    """
    if not isinstance(doc, dict):
        raise ValidationError("event must be a JSON object")
    kind_name = doc.get("event-kind")
    try:
        kind = EventKind(kind_name)
    except ValueError:
        raise ValidationError(f"unknown event-kind: {kind_name!r}") from None
    if doc.get("schema-version") != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema-version: {doc.get('schema-version')!r}")

    cls = _KIND_TO_TYPE[kind]
    expected = {f.name for f in fields(cls)}
    kwargs: dict[str, Any] = {}
    seen: set[str] = set()
    for key, raw in doc.items():
        if key in ("event-kind", "schema-version"):
            continue
        name = key.replace("-", "_")
        if name not in expected:
            raise ValidationError(f"unexpected field {key!r} for {kind.value}")
        seen.add(name)
        kwargs[name] = _parse_field(cls, name, raw)
    missing = expected - seen - _OPTIONAL_FIELDS
    if missing:
        nice = ", ".join(sorted(m.replace("_", "-") for m in missing))
        raise ValidationError(f"missing field(s) for {kind.value}: {nice}")
    for name in _OPTIONAL_FIELDS & expected:
        kwargs.setdefault(name, None)

    event = cls(**kwargs)
    if event.platform not in platforms:
        raise ValidationError(f"unknown platform: {event.platform!r}")
    return event


def _parse_field(cls: type, name: str, raw: Any) -> Any:
    if name in _DATETIME_FIELDS:
        return parse_rfc3339(raw)
    if name == "day":
        return parse_date(raw)
    if name == "commit_ids":
        if not isinstance(raw, list) or not all(isinstance(c, str) for c in raw):
            raise ValidationError("commit-ids must be a list of strings")
        return frozenset(raw)
    if name in _ENUM_FIELDS:
        try:
            return _ENUM_FIELDS[name](raw)
        except ValueError:
            raise ValidationError(f"invalid {name.replace('_', '-')}: {raw!r}") from None
    if name == "is_main_branch":
        if not isinstance(raw, bool):
            raise ValidationError("is-main-branch must be a boolean")
        return raw
    return raw


def parse_event_line(line: str, platforms: frozenset[str] | set[str]) -> Event:
    """Parse one JSON line; raises ValidationError on any defect."""
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc.msg}") from exc
    return parse_event(doc, platforms)


# ---------------------------------------------------------------------------
# Record identity and ordering
# ---------------------------------------------------------------------------

def natural_key(event: Event) -> str:
    """Stable per-source identity used to deduplicate and version records."""
    if isinstance(event, CommitEvent):
        # commit ids are only unique per platform
        return f"{event.platform}:{event.commit_id}"
    if isinstance(event, PullRequestEvent):
        return event.pr_id
    if isinstance(event, BuildEvent):
        return event.build_id
    if isinstance(event, DeploymentEvent):
        return event.deploy_id
    if isinstance(event, IssueEvent):
        return event.issue_id
    if isinstance(event, SessionStatsEvent):
        return f"{event.platform}:{event.day.isoformat()}"
    if isinstance(event, TestSuiteRunEvent):
        return event.run_id
    if isinstance(event, CoverageEvent):
        return f"{event.platform}:{format_rfc3339(event.measured_at)}"
    if isinstance(event, UsageStatsEvent):
        return f"{event.platform}:{event.month}"
    if isinstance(event, AssistantUsageEvent):
        return f"{event.platform}:{event.day.isoformat()}"
    raise TypeError(f"not an event: {event!r}")


def natural_timestamp(event: Event) -> datetime:
    """The timestamp that orders an event for incremental fetching."""
    if isinstance(event, CommitEvent):
        return event.committed_at
    if isinstance(event, PullRequestEvent):
        return event.merged_at or event.created_at
    if isinstance(event, BuildEvent):
        return event.finished_at
    if isinstance(event, DeploymentEvent):
        return event.deployed_at
    if isinstance(event, IssueEvent):
        return event.snapshot_at
    if isinstance(event, SessionStatsEvent):
        return datetime(event.day.year, event.day.month, event.day.day, tzinfo=UTC)
    if isinstance(event, TestSuiteRunEvent):
        return event.ran_at
    if isinstance(event, CoverageEvent):
        return event.measured_at
    if isinstance(event, UsageStatsEvent):
        return month_start(event.month)
    if isinstance(event, AssistantUsageEvent):
        return datetime(event.day.year, event.day.month, event.day.day, tzinfo=UTC)
    raise TypeError(f"not an event: {event!r}")


# ---------------------------------------------------------------------------
# Metric identities
# ---------------------------------------------------------------------------

class ValueKind(str, Enum):
    NUMBER = "number"
    DISTRIBUTION = "distribution"
    STATUS_TRIPLE = "status-triple"


class MetricId(str, Enum):
    LEAD_TIME_FOR_CHANGES = "lead-time-for-changes"
    PR_CYCLE_TIME = "pr-cycle-time"
    COMMIT_FREQUENCY = "commit-frequency"
    BUILD_INDUCED_LATENCY = "build-induced-latency"
    PR_THROUGHPUT = "pr-throughput"
    COPILOT_ACCEPTANCE_RATE = "copilot-acceptance-rate"
    STABILITY = "stability"
    USER_CRASH_RATE = "user-crash-rate"
    BLOCKER_CRITICAL_OPEN = "blocker-critical-open"
    BUG_MIX = "bug-mix"
    DEPLOYMENT_FREQUENCY = "deployment-frequency"
    MAIN_FAIL_RATE = "main-fail-rate"
    AVG_TURNAROUND_TIME = "avg-turnaround-time"
    AUTOMATION_COVERAGE = "automation-coverage"
    AUTOMATION_HEALTH = "automation-health"
    AUTOMATION_STATUS = "automation-status"
    MAU = "mau"
    ROLLING_MAU = "rolling-mau"
    # companion series backing the assistant acceptance rate; stored and
    # queryable but not part of the curated catalog
    COPILOT_SUGGESTIONS_SHOWN = "copilot-suggestions-shown"
    COPILOT_LINES_GENERATED = "copilot-lines-generated"


AUXILIARY_METRICS = frozenset(
    {MetricId.COPILOT_SUGGESTIONS_SHOWN, MetricId.COPILOT_LINES_GENERATED}
)

CATALOG_METRICS: tuple[MetricId, ...] = tuple(
    m for m in MetricId if m not in AUXILIARY_METRICS
)

_VALUE_KINDS: dict[MetricId, ValueKind] = {
    MetricId.BUG_MIX: ValueKind.DISTRIBUTION,
    MetricId.AUTOMATION_STATUS: ValueKind.STATUS_TRIPLE,
}


def value_kind(metric_id: MetricId) -> ValueKind:
    return _VALUE_KINDS.get(metric_id, ValueKind.NUMBER)


def is_numeric(metric_id: MetricId) -> bool:
    return value_kind(metric_id) is ValueKind.NUMBER


PERCENT_METRICS = frozenset(
    {
        MetricId.COPILOT_ACCEPTANCE_RATE,
        MetricId.STABILITY,
        MetricId.USER_CRASH_RATE,
        MetricId.MAIN_FAIL_RATE,
        MetricId.AUTOMATION_COVERAGE,
        MetricId.AUTOMATION_HEALTH,
    }
)
