"""Metric pre-computation: transforms raw records into normalized events and
computes every catalog metric per (scope, window).

Conventions shared by all computations:

- medians use the mean-of-middle-two rule for even sample sizes
- durations are reported in hours
- an empty sample produces no point for ratio/duration metrics (absence of
  data is distinguishable from a measured zero), while throughput and
  point-in-time count metrics emit measured zeros
- point-in-time metrics (open bug counts, automation status) evaluate at
  the window's end using each issue's latest snapshot at or before it
"""

from __future__ import annotations

import json
import re
import statistics
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta
from typing import Callable, Iterable, Sequence

from .domain import (
    AssistantUsageEvent,
    AutomationStatus,
    BuildEvent,
    CommitEvent,
    CoverageEvent,
    DeploymentEvent,
    Event,
    EventKind,
    Granularity,
    IssueEvent,
    IssueKind,
    IssueStatus,
    MetricId,
    Outcome,
    PrState,
    Priority,
    PullRequestEvent,
    Scope,
    SessionStatsEvent,
    TestSuiteRunEvent,
    TimeWindow,
    TriggerKind,
    UsageStatsEvent,
    ValidationError,
    event_kind,
    event_to_json,
    parse_event_line,
    standardize_user_id,
    value_kind,
)
from .storage import MetricPoint, Store

HOUR = timedelta(hours=1)


class AggregationPolicyError(ValidationError):
    """A computation would emit a scope that identifies an individual."""


@dataclass(frozen=True, slots=True)
class EngineConfig:
    platforms: frozenset[str]
    main_branch_pattern: str = "main"
    rolling_window_months: int = 3
    rolling_baseline_month: str | None = None

    def __post_init__(self) -> None:
        re.compile(self.main_branch_pattern)
        if self.rolling_window_months < 1:
            raise ValidationError("rolling window must cover at least one month")


@dataclass(frozen=True, slots=True)
class ComputationRequest:
    metric_ids: frozenset[MetricId]
    scopes: tuple[Scope, ...]
    windows: tuple[TimeWindow, ...]

    def __post_init__(self) -> None:
        if not self.metric_ids or not self.scopes or not self.windows:
            raise ValidationError("computation request needs metrics, scopes, and windows")


@dataclass(frozen=True, slots=True)
class SourcedEvent:
    """A parsed event plus the raw-record identity it came from."""

    event: Event
    source_id: str
    natural_key: str
    version: int
    fetched_at: datetime
    payload: str


@dataclass(frozen=True, slots=True)
class MetricResult:
    value: float | int | dict[str, int]
    sample_size: int
    sample: tuple[SourcedEvent, ...]


@dataclass
class ProcessingReport:
    points_upserted: int = 0
    events_loaded: int = 0
    unparseable_payloads: int = 0
    points: list[MetricPoint] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Raw-record loading and transformation
# ---------------------------------------------------------------------------

def _standardize(event: Event) -> Event:
    if isinstance(event, (CommitEvent, PullRequestEvent)):
        return replace(event, author_id=standardize_user_id(event.author_id))
    return event


def load_events(store: Store, platforms: frozenset[str]) -> tuple[list[SourcedEvent], int]:
    """Parse the raw namespace into normalized events.

    The latest version of each record wins, except issue records whose
    older versions are retained as historical snapshots. Payloads that do
    not parse are skipped and counted, never silently dropped elsewhere.
    """
    stored = store.read_raw(latest_only=False)
    by_key: dict[tuple[str, str], list] = {}
    for item in stored:
        by_key.setdefault((item.record.source_id, item.record.natural_key), []).append(item)

    events: list[SourcedEvent] = []
    unparseable = 0
    for versions in by_key.values():
        versions.sort(key=lambda s: s.version)
        latest = versions[-1]
        try:
            parsed = _standardize(parse_event_line(latest.record.payload, platforms))
        except ValidationError:
            unparseable += 1
            continue
        chosen = [latest] if not isinstance(parsed, IssueEvent) else versions
        for item in chosen:
            try:
                event = _standardize(parse_event_line(item.record.payload, platforms))
            except ValidationError:
                unparseable += 1
                continue
            events.append(
                SourcedEvent(
                    event=event,
                    source_id=item.record.source_id,
                    natural_key=item.record.natural_key,
                    version=item.version,
                    fetched_at=item.record.fetched_at,
                    payload=item.record.payload,
                )
            )
    events.sort(key=lambda se: (se.source_id, se.natural_key, se.version))
    return events, unparseable


@dataclass(slots=True)
class ScopedEvents:
    """Events of one scope, split by kind."""

    commits: list[SourcedEvent] = field(default_factory=list)
    prs: list[SourcedEvent] = field(default_factory=list)
    builds: list[SourcedEvent] = field(default_factory=list)
    deployments: list[SourcedEvent] = field(default_factory=list)
    issues: list[SourcedEvent] = field(default_factory=list)
    sessions: list[SourcedEvent] = field(default_factory=list)
    test_runs: list[SourcedEvent] = field(default_factory=list)
    coverages: list[SourcedEvent] = field(default_factory=list)
    usages: list[SourcedEvent] = field(default_factory=list)
    assists: list[SourcedEvent] = field(default_factory=list)


_KIND_BUCKETS = {
    EventKind.COMMIT: "commits",
    EventKind.PULL_REQUEST: "prs",
    EventKind.BUILD: "builds",
    EventKind.DEPLOYMENT: "deployments",
    EventKind.ISSUE: "issues",
    EventKind.SESSION_STATS: "sessions",
    EventKind.TEST_SUITE_RUN: "test_runs",
    EventKind.COVERAGE: "coverages",
    EventKind.USAGE_STATS: "usages",
    EventKind.ASSISTANT_USAGE: "assists",
}


def scope_events(events: Iterable[SourcedEvent], scope: Scope) -> ScopedEvents:
    scoped = ScopedEvents()
    for sourced in events:
        if scope.contains_event(sourced.event):
            getattr(scoped, _KIND_BUCKETS[event_kind(sourced.event)]).append(sourced)
    return scoped


def _day_ts(day) -> datetime:
    from .domain import UTC

    return datetime(day.year, day.month, day.day, tzinfo=UTC)


def _median(values: Sequence[float]) -> float:
    return float(statistics.median(values))


def _hours(delta: timedelta) -> float:
    return delta / HOUR


# ---------------------------------------------------------------------------
# Individual metric computations
# ---------------------------------------------------------------------------

def lead_time_for_changes(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Median hours from commit to its first successful production deployment."""
    deploys = sorted(
        (se for se in scoped.deployments if se.event.outcome is Outcome.SUCCESS),
        key=lambda se: (se.event.deployed_at, se.event.deploy_id),
    )
    containing: dict[tuple[str, str], list[SourcedEvent]] = {}
    for se in deploys:
        for commit_id in se.event.commit_ids:
            containing.setdefault((se.event.platform, commit_id), []).append(se)

    leads: list[float] = []
    sample: list[SourcedEvent] = []
    sample_deploys: dict[str, SourcedEvent] = {}
    for se in sorted(scoped.commits, key=lambda s: (s.event.committed_at, s.event.commit_id)):
        commit = se.event
        deploy = next(
            (
                d
                for d in containing.get((commit.platform, commit.commit_id), [])
                if d.event.deployed_at >= commit.committed_at
            ),
            None,
        )
        if deploy is None or not window.contains(deploy.event.deployed_at):
            continue
        leads.append(_hours(deploy.event.deployed_at - commit.committed_at))
        sample.append(se)
        sample_deploys[deploy.event.deploy_id] = deploy
    if not leads:
        return None
    sample.extend(sample_deploys.values())
    return MetricResult(_median(leads), len(leads), tuple(sample))


def pr_cycle_time(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Median hours from pull-request creation to merge."""
    merged = [
        se
        for se in scoped.prs
        if se.event.state is PrState.MERGED and window.contains(se.event.merged_at)
    ]
    if not merged:
        return None
    cycles = sorted(_hours(se.event.merged_at - se.event.created_at) for se in merged)
    return MetricResult(_median(cycles), len(merged), tuple(merged))


def commit_frequency(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Average commits per developer per day on the main development branch."""
    pattern = re.compile(config.main_branch_pattern)
    sample = [
        se
        for se in scoped.commits
        if window.contains(se.event.committed_at) and pattern.fullmatch(se.event.branch)
    ]
    if not sample:
        return None
    authors = {se.event.author_id for se in sample}
    value = len(sample) / (len(authors) * window.days)
    return MetricResult(value, len(sample), tuple(sample))


def build_induced_latency(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Median hours a developer waits for pull-request CI feedback."""
    sample = [
        se
        for se in scoped.builds
        if se.event.trigger_kind is TriggerKind.PR_FEEDBACK
        and window.contains(se.event.finished_at)
    ]
    if not sample:
        return None
    latencies = [_hours(se.event.finished_at - se.event.triggered_at) for se in sample]
    return MetricResult(_median(latencies), len(sample), tuple(sample))


def pr_throughput(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Merged pull requests scaled to a per-week rate (a measured zero counts)."""
    merged = [
        se
        for se in scoped.prs
        if se.event.state is PrState.MERGED and window.contains(se.event.merged_at)
    ]
    value = len(merged) * 7.0 / window.days
    return MetricResult(value, len(merged), tuple(merged))


def _assistant_sample(scoped: ScopedEvents, window: TimeWindow) -> list[SourcedEvent]:
    return [se for se in scoped.assists if window.contains(_day_ts(se.event.day))]


def copilot_acceptance_rate(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    sample = _assistant_sample(scoped, window)
    shown = sum(se.event.suggestions_shown for se in sample)
    if shown == 0:
        return None
    accepted = sum(se.event.suggestions_accepted for se in sample)
    return MetricResult(100.0 * accepted / shown, len(sample), tuple(sample))


def copilot_suggestions_shown(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    sample = _assistant_sample(scoped, window)
    if not sample:
        return None
    return MetricResult(sum(se.event.suggestions_shown for se in sample), len(sample), tuple(sample))


def copilot_lines_generated(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    sample = _assistant_sample(scoped, window)
    if not sample:
        return None
    return MetricResult(sum(se.event.lines_generated for se in sample), len(sample), tuple(sample))


def stability(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Percent of users who did not experience a crash."""
    sample = [se for se in scoped.sessions if window.contains(_day_ts(se.event.day))]
    total_users = sum(se.event.total_users for se in sample)
    if total_users == 0:
        return None
    crash_free = sum(se.event.crash_free_users for se in sample)
    return MetricResult(100.0 * crash_free / total_users, len(sample), tuple(sample))


def user_crash_rate(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Percent of sessions that ended in a crash."""
    sample = [se for se in scoped.sessions if window.contains(_day_ts(se.event.day))]
    total_sessions = sum(se.event.total_sessions for se in sample)
    if total_sessions == 0:
        return None
    crashed = sum(se.event.crashed_sessions for se in sample)
    return MetricResult(100.0 * crashed / total_sessions, len(sample), tuple(sample))


def _latest_snapshots(issues: Iterable[SourcedEvent], as_of: datetime) -> list[SourcedEvent]:
    """Latest snapshot per issue at or before as-of (content-tie-broken)."""
    latest: dict[str, SourcedEvent] = {}
    for se in issues:
        if se.event.snapshot_at > as_of:
            continue
        current = latest.get(se.event.issue_id)
        if current is None or (se.event.snapshot_at, event_to_json(se.event)) > (
            current.event.snapshot_at,
            event_to_json(current.event),
        ):
            latest[se.event.issue_id] = se
    return [latest[key] for key in sorted(latest)]


def blocker_critical_open(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Open blocker/critical bug count as of the window's end."""
    matched = [
        se
        for se in _latest_snapshots(scoped.issues, window.end)
        if se.event.kind is IssueKind.BUG
        and se.event.status is IssueStatus.OPEN
        and se.event.priority in (Priority.BLOCKER, Priority.CRITICAL)
    ]
    return MetricResult(len(matched), len(matched), tuple(matched))


def bug_mix(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Distribution of open bugs across severity levels as of the window's end."""
    open_bugs = [
        se
        for se in _latest_snapshots(scoped.issues, window.end)
        if se.event.kind is IssueKind.BUG and se.event.status is IssueStatus.OPEN
    ]
    counts = {priority.value: 0 for priority in Priority}
    for se in open_bugs:
        counts[se.event.priority.value] += 1
    return MetricResult(counts, len(open_bugs), tuple(open_bugs))


def deployment_frequency(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Successful production deployments scaled to a per-week rate."""
    sample = [
        se
        for se in scoped.deployments
        if se.event.outcome is Outcome.SUCCESS and window.contains(se.event.deployed_at)
    ]
    value = len(sample) * 7.0 / window.days
    return MetricResult(value, len(sample), tuple(sample))


def main_fail_rate(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Percent of main-branch builds that failed in the window."""
    sample = [
        se
        for se in scoped.builds
        if se.event.is_main_branch and window.contains(se.event.finished_at)
    ]
    if not sample:
        return None
    failed = sum(1 for se in sample if se.event.outcome is Outcome.FAILURE)
    return MetricResult(100.0 * failed / len(sample), len(sample), tuple(sample))


def avg_turnaround_time(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Mean hours from build trigger to successful completion."""
    sample = [
        se
        for se in scoped.builds
        if se.event.outcome is Outcome.SUCCESS and window.contains(se.event.finished_at)
    ]
    if not sample:
        return None
    hours = [_hours(se.event.finished_at - se.event.triggered_at) for se in sample]
    return MetricResult(sum(hours) / len(hours), len(sample), tuple(sample))


def automation_coverage(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Statement coverage percent from the freshest snapshot in the window."""
    candidates = [se for se in scoped.coverages if window.contains(se.event.measured_at)]
    if not candidates:
        return None
    latest = max(candidates, key=lambda se: (se.event.measured_at, event_to_json(se.event)))
    if latest.event.statements_total == 0:
        return None
    value = 100.0 * latest.event.statements_covered / latest.event.statements_total
    return MetricResult(value, 1, (latest,))


def automation_health(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Percent of automated test suites that passed across runs in the window."""
    sample = [se for se in scoped.test_runs if window.contains(se.event.ran_at)]
    total = sum(se.event.suites_total for se in sample)
    if total == 0:
        return None
    passed = sum(se.event.suites_passed for se in sample)
    return MetricResult(100.0 * passed / total, len(sample), tuple(sample))


def automation_status(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Counts of testable issues per automation status as of the window's end."""
    snapshots = [
        se
        for se in _latest_snapshots(scoped.issues, window.end)
        if se.event.automation_status is not None
    ]
    counts = {status.value: 0 for status in AutomationStatus}
    for se in snapshots:
        counts[se.event.automation_status.value] += 1
    return MetricResult(counts, len(snapshots), tuple(snapshots))


def _window_month(window: TimeWindow) -> str:
    return f"{window.start.year:04d}-{window.start.month:02d}"


def _shift_month(month: str, offset: int) -> str:
    year, mon = (int(part) for part in month.split("-"))
    index = year * 12 + (mon - 1) + offset
    return f"{index // 12:04d}-{index % 12 + 1:02d}"


def _monthly_series(scoped: ScopedEvents) -> dict[str, tuple[int, list[SourcedEvent]]]:
    series: dict[str, tuple[int, list[SourcedEvent]]] = {}
    for se in sorted(scoped.usages, key=lambda s: (s.event.month, s.event.platform)):
        total, contributors = series.get(se.event.month, (0, []))
        series[se.event.month] = (total + se.event.active_users, contributors + [se])
    return series


def mau(scoped: ScopedEvents, window: TimeWindow, config: EngineConfig) -> MetricResult | None:
    """Monthly active users for the window's month."""
    if window.granularity is not Granularity.MONTHLY:
        return None
    series = _monthly_series(scoped)
    entry = series.get(_window_month(window))
    if entry is None:
        return None
    total, contributors = entry
    return MetricResult(total, len(contributors), tuple(contributors))


def rolling_mau(
    scoped: ScopedEvents, window: TimeWindow, config: EngineConfig
) -> MetricResult | None:
    """Smoothed engagement index: trailing-mean MAU as a percent of baseline.

    The trailing mean covers the configured number of calendar months ending
    at the window's month, skipping months without data; the baseline is the
    first month in the series unless one is configured.
    """
    if window.granularity is not Granularity.MONTHLY:
        return None
    series = _monthly_series(scoped)
    month = _window_month(window)
    if month not in series:
        return None
    baseline_month = config.rolling_baseline_month or min(series)
    baseline = series.get(baseline_month)
    if baseline is None or baseline[0] == 0:
        return None
    trail_months = [
        _shift_month(month, -offset) for offset in range(config.rolling_window_months)
    ]
    present = [m for m in trail_months if m in series]
    trailing_mean = sum(series[m][0] for m in present) / len(present)
    sample: list[SourcedEvent] = []
    for m in sorted(present):
        sample.extend(series[m][1])
    return MetricResult(100.0 * trailing_mean / baseline[0], len(present), tuple(sample))


COMPUTERS: dict[MetricId, Callable[[ScopedEvents, TimeWindow, EngineConfig], MetricResult | None]] = {
    MetricId.LEAD_TIME_FOR_CHANGES: lead_time_for_changes,
    MetricId.PR_CYCLE_TIME: pr_cycle_time,
    MetricId.COMMIT_FREQUENCY: commit_frequency,
    MetricId.BUILD_INDUCED_LATENCY: build_induced_latency,
    MetricId.PR_THROUGHPUT: pr_throughput,
    MetricId.COPILOT_ACCEPTANCE_RATE: copilot_acceptance_rate,
    MetricId.COPILOT_SUGGESTIONS_SHOWN: copilot_suggestions_shown,
    MetricId.COPILOT_LINES_GENERATED: copilot_lines_generated,
    MetricId.STABILITY: stability,
    MetricId.USER_CRASH_RATE: user_crash_rate,
    MetricId.BLOCKER_CRITICAL_OPEN: blocker_critical_open,
    MetricId.BUG_MIX: bug_mix,
    MetricId.DEPLOYMENT_FREQUENCY: deployment_frequency,
    MetricId.MAIN_FAIL_RATE: main_fail_rate,
    MetricId.AVG_TURNAROUND_TIME: avg_turnaround_time,
    MetricId.AUTOMATION_COVERAGE: automation_coverage,
    MetricId.AUTOMATION_HEALTH: automation_health,
    MetricId.AUTOMATION_STATUS: automation_status,
    MetricId.MAU: mau,
    MetricId.ROLLING_MAU: rolling_mau,
}


# ---------------------------------------------------------------------------
# Aggregation policy
# ---------------------------------------------------------------------------

def _author_labels(events: Iterable[SourcedEvent]) -> set[str]:
    labels: set[str] = set()
    for se in events:
        author = getattr(se.event, "author_id", None)
        if author:
            labels.add(author.casefold())
            labels.add(standardize_user_id(author))
    return labels


def check_aggregation_policy(scopes: Iterable[Scope], events: Iterable[SourcedEvent]) -> None:
    """Refuse scopes whose labels collide with any author identity.

    Metrics are only ever aggregated at the team, platform, or org level;
    author ids participate in computations but never in emitted scopes.
    """
    authors = _author_labels(events)
    for scope in scopes:
        for label in (scope.platform, scope.team):
            if label is not None and label.casefold() in authors:
                raise AggregationPolicyError(
                    f"scope label {label!r} identifies an individual contributor"
                )


# ---------------------------------------------------------------------------
# Processing runs
# ---------------------------------------------------------------------------

def compute_point(
    scoped: ScopedEvents,
    metric_id: MetricId,
    scope: Scope,
    window: TimeWindow,
    config: EngineConfig,
    now: datetime,
) -> tuple[MetricPoint, MetricResult] | None:
    result = COMPUTERS[metric_id](scoped, window, config)
    if result is None:
        return None
    point = MetricPoint(
        metric_id=metric_id,
        scope=scope,
        window=window,
        value=result.value,
        computed_at=now,
        sample_size=result.sample_size,
    )
    return point, result


def run_processing(
    store: Store,
    request: ComputationRequest,
    config: EngineConfig,
    now: datetime,
) -> ProcessingReport:
    """Compute every requested (metric, scope, window) and upsert the points.

    Reads a snapshot of the raw store taken at run start; deterministic for
    a given raw store, request, and clock instant.
    """
    events, unparseable = load_events(store, config.platforms)
    check_aggregation_policy(request.scopes, events)
    report = ProcessingReport(events_loaded=len(events), unparseable_payloads=unparseable)
    for scope in sorted(request.scopes, key=lambda s: s.key):
        scoped = scope_events(events, scope)
        for window in sorted(request.windows, key=lambda w: (w.granularity.value, w.start)):
            for metric_id in sorted(request.metric_ids, key=lambda m: m.value):
                computed = compute_point(scoped, metric_id, scope, window, config, now)
                if computed is None:
                    continue
                point, _ = computed
                store.upsert_metric(point)
                report.points.append(point)
                report.points_upserted += 1
    return report


def collect_sample(
    store: Store,
    metric_id: MetricId,
    scope: Scope,
    window: TimeWindow,
    config: EngineConfig,
) -> MetricResult | None:
    """Recompute one point's value and return its contributing events.

    Drill-down re-runs the metric's event filter over the raw store, so the
    returned records always recompute exactly the stored value.
    """
    events, _ = load_events(store, config.platforms)
    scoped = scope_events(events, scope)
    return COMPUTERS[metric_id](scoped, window, config)


def discover_scopes(events: Iterable[SourcedEvent]) -> list[Scope]:
    """Org plus every platform and (platform, team) observed in the data."""
    scopes = {Scope()}
    for se in events:
        scopes.add(Scope(platform=se.event.platform))
        team = getattr(se.event, "team", None)
        if team:
            scopes.add(Scope(platform=se.event.platform, team=team))
    return sorted(scopes, key=lambda s: s.key)


def data_span(events: Iterable[SourcedEvent]) -> tuple[datetime, datetime] | None:
    from .domain import natural_timestamp

    stamps = [natural_timestamp(se.event) for se in events]
    if not stamps:
        return None
    return min(stamps), max(stamps)


# ---------------------------------------------------------------------------
# Metric catalog document
# ---------------------------------------------------------------------------

_CATALOG_INFO: dict[MetricId, tuple[str, str, str]] = {
    MetricId.LEAD_TIME_FOR_CHANGES: ("Lead Time for Changes", "hours", "productivity"),
    MetricId.PR_CYCLE_TIME: ("PR Cycle Time", "hours", "productivity"),
    MetricId.COMMIT_FREQUENCY: ("Code Commit Frequency", "commits/dev/day", "productivity"),
    MetricId.BUILD_INDUCED_LATENCY: ("Build Induced Latency", "hours", "productivity"),
    MetricId.PR_THROUGHPUT: ("PR Throughput", "prs/week", "productivity"),
    MetricId.COPILOT_ACCEPTANCE_RATE: ("Assistant Acceptance Rate", "percent", "productivity"),
    MetricId.STABILITY: ("Stability", "percent", "quality"),
    MetricId.USER_CRASH_RATE: ("User Crash Rate", "percent", "quality"),
    MetricId.BLOCKER_CRITICAL_OPEN: ("Open Blocker/Critical Bugs", "count", "quality"),
    MetricId.BUG_MIX: ("Bug Mix", "count-by-priority", "quality"),
    MetricId.DEPLOYMENT_FREQUENCY: ("Deployment Frequency", "deploys/week", "operations"),
    MetricId.MAIN_FAIL_RATE: ("Main Fail Rate", "percent", "operations"),
    MetricId.AVG_TURNAROUND_TIME: ("Average Turnaround Time", "hours", "operations"),
    MetricId.AUTOMATION_COVERAGE: ("Automation Code Coverage", "percent", "automation"),
    MetricId.AUTOMATION_HEALTH: ("Automation Health", "percent", "automation"),
    MetricId.AUTOMATION_STATUS: ("Test Automation Status", "count-by-status", "automation"),
    MetricId.MAU: ("Monthly Active Users", "users", "engagement"),
    MetricId.ROLLING_MAU: ("Rolling MAU", "percent-of-baseline", "engagement"),
}


def catalog_document(thresholds: dict[MetricId, list[dict]] | None = None) -> dict:
    """Machine-readable catalog shared by the query API and the dashboard."""
    thresholds = thresholds or {}
    metrics = []
    for metric_id, (title, unit, area) in _CATALOG_INFO.items():
        metrics.append(
            {
                "metric-id": metric_id.value,
                "title": title,
                "unit": unit,
                "area": area,
                "value-kind": value_kind(metric_id).value,
                "thresholds": thresholds.get(metric_id, []),
            }
        )
    return {"schema-version": 1, "metrics": metrics}


def catalog_json(thresholds: dict[MetricId, list[dict]] | None = None) -> str:
    return json.dumps(catalog_document(thresholds), indent=2, sort_keys=True)
