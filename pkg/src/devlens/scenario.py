"""Deterministic synthetic-telemetry generator for tests, demos, and golden runs.

Writes the connector fixture layout (`<root>/<source>/<kind>.jsonl`) for a
multi-platform scenario: steady baselines, a CI-incident curve where daily
main-branch fail rates and PR cycle-time medians follow a prescribed
series exactly, and a crash-rate spike that crosses the alerting
threshold. Same seed, same bytes.

Exactness is by construction: each day's fail-rate percent is realized as
the smallest k-failures-of-n-builds fraction with at least 25 main builds
(so the 20% incident peak is exactly 5 failures out of 25), and each
cycle-time target is the median of a 3-PR batch built around it.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from fractions import Fraction
from math import ceil
from pathlib import Path

from .domain import (
    AssistantUsageEvent,
    AutomationStatus,
    BuildEvent,
    CommitEvent,
    CoverageEvent,
    DeploymentEvent,
    Event,
    IssueEvent,
    IssueKind,
    IssueStatus,
    Outcome,
    Priority,
    PrState,
    PullRequestEvent,
    SessionStatsEvent,
    TestSuiteRunEvent,
    TriggerKind,
    UsageStatsEvent,
    UTC,
    ValidationError,
    event_kind,
    event_to_json,
)

MIN_MAIN_BUILDS_PER_DAY = 25

SOURCE_FOR_KIND = {
    "commit": "git",
    "pull-request": "git",
    "build": "splunk",
    "deployment": "deploy",
    "issue": "jira",
    "session-stats": "crash",
    "test-suite-run": "jenkins",
    "coverage": "jenkins",
    "usage-stats": "tableau",
    "assistant-usage": "copilot",
}

SOURCE_SCHEDULES = {
    "git": "0 1 * * *",
    "splunk": "0 * * * *",
    "deploy": "15 1 * * *",
    "jira": "30 1 * * *",
    "crash": "45 1 * * *",
    "jenkins": "0 2 * * *",
    "tableau": "15 2 * * *",
    "copilot": "30 2 * * *",
}

FIG3_FAIL_RATES = (4, 5, 4, 6, 15, 20, 18, 16, 7, 5, 4, 5, 4, 4)
FIG3_CYCLE_TIMES = (28, 26, 29, 31, 45, 52, 55, 48, 32, 29, 28, 27, 28, 26)

_AUTHORS = ("alice", "bob", "carol", "dana", "erik")


@dataclass(frozen=True, slots=True)
class IncidentSpec:
    start_day: int
    duration_days: int
    fail_rate_peak: float
    cycle_time_peak: float

    def __post_init__(self) -> None:
        if self.fail_rate_peak <= 0 or self.cycle_time_peak <= 0:
            raise ValidationError("incident peaks must be positive")
        if self.start_day < 1 or self.duration_days < 1:
            raise ValidationError("incident must start on day 1 or later and last at least a day")


@dataclass(frozen=True, slots=True)
class ScenarioSpec:
    seed: int
    days: int
    platforms: tuple[str, ...] = ("android", "web")
    teams: tuple[str, ...] = ("growth", "core")
    start: date = date(2024, 3, 4)  # a Monday, so weekly windows align
    incident: IncidentSpec | None = None
    incident_platform: str | None = None
    crash_spike_days: tuple[int, ...] = ()
    fail_rate_series: tuple[float, ...] | None = None
    cycle_time_series: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.days < 1:
            raise ValidationError("scenario needs at least one day")
        if not self.platforms:
            raise ValidationError("scenario needs at least one platform")
        if self.incident is not None:
            if self.incident.start_day + self.incident.duration_days - 1 > self.days:
                raise ValidationError("incident must fit inside the scenario days")
        for series in (self.fail_rate_series, self.cycle_time_series):
            if series is not None and len(series) != self.days:
                raise ValidationError("series overrides must cover every day")
        if any(d < 1 or d > self.days for d in self.crash_spike_days):
            raise ValidationError("crash spike days must fall inside the scenario")

    @property
    def hot_platform(self) -> str:
        return self.incident_platform or self.platforms[0]


def preset(name: str) -> ScenarioSpec:
    if name == "steady":
        return ScenarioSpec(seed=1204, days=14)
    if name == "fig3-incident":
        return ScenarioSpec(
            seed=1203,
            days=14,
            incident=IncidentSpec(
                start_day=5, duration_days=4, fail_rate_peak=20.0, cycle_time_peak=55.0
            ),
            fail_rate_series=tuple(float(v) for v in FIG3_FAIL_RATES),
            cycle_time_series=tuple(float(v) for v in FIG3_CYCLE_TIMES),
        )
    if name == "crash-spike":
        return ScenarioSpec(seed=1205, days=7, crash_spike_days=(5, 6))
    raise ValidationError(f"unknown preset: {name!r}")


def fail_fraction(percent: float) -> tuple[int, int]:
    """Realize a daily fail-rate percent as exact (failures, total builds)."""
    fraction = Fraction(percent).limit_denominator(10_000) / 100
    if not 0 <= fraction <= 1:
        raise ValidationError(f"fail rate out of range: {percent}")
    if fraction.denominator > 100:
        raise ValidationError(f"fail rate {percent} needs more than 100 builds/day")
    scale = ceil(MIN_MAIN_BUILDS_PER_DAY / fraction.denominator) if fraction else 1
    total = fraction.denominator * scale if fraction else MIN_MAIN_BUILDS_PER_DAY
    return fraction.numerator * scale, total


def _synth_series(spec: ScenarioSpec, rng: random.Random) -> tuple[list[float], list[float]]:
    """Daily fail-rate and cycle-time targets when no explicit override is given."""
    fail = [float(rng.choice((4, 5))) for _ in range(spec.days)]
    cycle = [float(rng.choice((26, 27, 28, 29, 30))) for _ in range(spec.days)]
    if spec.incident is not None:
        first = spec.incident.start_day - 1
        for offset in range(spec.incident.duration_days):
            ramp = 1.0 - abs((offset + 0.5) / spec.incident.duration_days - 0.5)
            fail[first + offset] = float(round(spec.incident.fail_rate_peak * ramp) or 1)
            cycle[first + offset] = float(round(spec.incident.cycle_time_peak * ramp) or 1)
    return fail, cycle


@dataclass
class ScenarioEvents:
    events: list[Event] = field(default_factory=list)

    def add(self, event: Event) -> None:
        self.events.append(event)


def build_events(spec: ScenarioSpec) -> list[Event]:
    """All scenario events, deterministically ordered."""
    rng = random.Random(spec.seed)
    out = ScenarioEvents()
    fail_series = list(spec.fail_rate_series) if spec.fail_rate_series else None
    cycle_series = list(spec.cycle_time_series) if spec.cycle_time_series else None
    if fail_series is None or cycle_series is None:
        synth_fail, synth_cycle = _synth_series(spec, rng)
        fail_series = fail_series or synth_fail
        cycle_series = cycle_series or synth_cycle

    for platform in spec.platforms:
        hot = platform == spec.hot_platform
        steady_rng = random.Random(spec.seed * 7919 + zlib.crc32(platform.encode("utf-8")))
        for day_no in range(1, spec.days + 1):
            day = spec.start + timedelta(days=day_no - 1)
            midnight = datetime.combine(day, time(0), tzinfo=UTC)
            if hot:
                fail_pct = fail_series[day_no - 1]
                cycle_target = cycle_series[day_no - 1]
            else:
                fail_pct = float(steady_rng.choice((4, 5)))
                cycle_target = float(steady_rng.choice((26, 28, 30)))

            _add_builds(out, platform, day_no, midnight, fail_pct, steady_rng)
            _add_prs(out, spec, platform, day_no, midnight, cycle_target)
            _add_commits_and_deploy(out, platform, day_no, midnight)
            _add_sessions(out, spec, platform, day_no, day)
            _add_daily_automation(out, platform, day_no, midnight, day)
        _add_issues(out, spec, platform)
        _add_usage(out, spec, platform)
    return out.events


def _add_builds(out, platform, day_no, midnight, fail_pct, rng):
    failures, total = fail_fraction(fail_pct)
    fail_slots = set(rng.sample(range(total), failures))
    for i in range(total):
        triggered = midnight + timedelta(hours=1, minutes=12 * i)
        out.add(
            BuildEvent(
                build_id=f"{platform}-main-{day_no:02d}-{i:03d}",
                platform=platform,
                branch="main",
                is_main_branch=True,
                trigger_kind=TriggerKind.MAIN,
                pr_id=None,
                triggered_at=triggered,
                finished_at=triggered + timedelta(minutes=24),
                outcome=Outcome.FAILURE if i in fail_slots else Outcome.SUCCESS,
            )
        )
    for i in range(4):
        triggered = midnight + timedelta(hours=6, minutes=30 * i)
        out.add(
            BuildEvent(
                build_id=f"{platform}-fb-{day_no:02d}-{i:02d}",
                platform=platform,
                branch=f"feature-{day_no}-{i}",
                is_main_branch=False,
                trigger_kind=TriggerKind.PR_FEEDBACK,
                pr_id=f"{platform}-pr-{day_no:02d}-{i % 3}",
                triggered_at=triggered,
                finished_at=triggered + timedelta(minutes=18 + 6 * i),
                outcome=Outcome.SUCCESS if i % 3 else Outcome.FAILURE,
            )
        )


def _add_prs(out, spec, platform, day_no, midnight, cycle_target):
    low = min(4.0, max(cycle_target - 1.0, 0.5))
    offsets = (-low, 0.0, 6.0)
    for i, offset in enumerate(offsets):
        merged = midnight + timedelta(hours=11 + 2 * i)
        cycle_hours = cycle_target + offset
        out.add(
            PullRequestEvent(
                pr_id=f"{platform}-pr-{day_no:02d}-{i}",
                author_id=_AUTHORS[(day_no + i) % len(_AUTHORS)],
                team=spec.teams[(day_no + i) % len(spec.teams)],
                platform=platform,
                created_at=merged - timedelta(hours=cycle_hours),
                merged_at=merged,
                state=PrState.MERGED,
            )
        )
    if day_no % 3 == 0:
        out.add(
            PullRequestEvent(
                pr_id=f"{platform}-pr-open-{day_no:02d}",
                author_id=_AUTHORS[day_no % len(_AUTHORS)],
                team=spec.teams[day_no % len(spec.teams)],
                platform=platform,
                created_at=midnight + timedelta(hours=9),
                merged_at=None,
                state=PrState.OPEN,
            )
        )


def _add_commits_and_deploy(out, platform, day_no, midnight):
    commit_ids = []
    for i in range(5):
        commit_id = f"{platform}-c-{day_no:02d}-{i}"
        branch = "main" if i < 4 else f"feature-{day_no}"
        out.add(
            CommitEvent(
                commit_id=commit_id,
                author_id=_AUTHORS[(day_no + i) % len(_AUTHORS)],
                branch=branch,
                committed_at=midnight + timedelta(hours=9, minutes=30 * i),
                platform=platform,
            )
        )
        if branch == "main":
            commit_ids.append(commit_id)
    out.add(
        DeploymentEvent(
            deploy_id=f"{platform}-dep-{day_no:02d}",
            platform=platform,
            deployed_at=midnight + timedelta(hours=18),
            commit_ids=frozenset(commit_ids),
            outcome=Outcome.SUCCESS,
        )
    )


def _add_sessions(out, spec, platform, day_no, day):
    spike = platform == spec.hot_platform and day_no in spec.crash_spike_days
    crashed = 60 if spike else 20
    out.add(
        SessionStatsEvent(
            platform=platform,
            day=day,
            total_sessions=1000,
            crashed_sessions=crashed,
            total_users=500,
            crash_free_users=460 if spike else 490,
        )
    )


def _add_daily_automation(out, platform, day_no, midnight, day):
    out.add(
        TestSuiteRunEvent(
            run_id=f"{platform}-run-{day_no:02d}",
            platform=platform,
            ran_at=midnight + timedelta(hours=5),
            suites_total=20,
            suites_passed=19,
        )
    )
    out.add(
        CoverageEvent(
            platform=platform,
            measured_at=midnight + timedelta(hours=5, minutes=30),
            statements_total=1000,
            statements_covered=800,
        )
    )
    out.add(
        AssistantUsageEvent(
            platform=platform,
            day=day,
            suggestions_shown=200,
            suggestions_accepted=50,
            suggestions_declined=100,
            lines_generated=500,
        )
    )


def _add_issues(out, spec, platform):
    opened = datetime.combine(spec.start, time(8), tzinfo=UTC)
    priorities = (Priority.BLOCKER, Priority.CRITICAL, Priority.MAJOR, Priority.NORMAL,
                  Priority.MINOR, Priority.MAJOR)
    for i, priority in enumerate(priorities):
        issue_id = f"{platform}-bug-{i}"
        out.add(
            IssueEvent(
                issue_id=issue_id,
                platform=platform,
                kind=IssueKind.BUG,
                priority=priority,
                status=IssueStatus.OPEN,
                automation_status=None,
                opened_at=opened,
                closed_at=None,
                snapshot_at=opened + timedelta(hours=i),
            )
        )
        # two of the bugs close halfway through the scenario
        if i in (1, 5) and spec.days >= 4:
            closed_at = opened + timedelta(days=spec.days // 2)
            out.add(
                IssueEvent(
                    issue_id=issue_id,
                    platform=platform,
                    kind=IssueKind.BUG,
                    priority=priority,
                    status=IssueStatus.CLOSED,
                    automation_status=None,
                    opened_at=opened,
                    closed_at=closed_at,
                    snapshot_at=closed_at,
                )
            )
    statuses = (
        [AutomationStatus.TO_BE_AUTOMATED] * 3
        + [AutomationStatus.AUTOMATED] * 5
        + [AutomationStatus.CANNOT_AUTOMATE]
    )
    for i, status in enumerate(statuses):
        out.add(
            IssueEvent(
                issue_id=f"{platform}-story-{i}",
                platform=platform,
                kind=IssueKind.STORY,
                priority=Priority.NORMAL,
                status=IssueStatus.OPEN,
                automation_status=status,
                opened_at=opened,
                closed_at=None,
                snapshot_at=opened + timedelta(minutes=i),
            )
        )


def _add_usage(out, spec, platform):
    months = []
    for day_no in range(1, spec.days + 1):
        day = spec.start + timedelta(days=day_no - 1)
        month = f"{day.year:04d}-{day.month:02d}"
        if month not in months:
            months.append(month)
    base = 1000 + (zlib.crc32(platform.encode("utf-8")) % 7) * 50
    for i, month in enumerate(months):
        out.add(
            UsageStatsEvent(platform=platform, month=month, active_users=base + 100 * i)
        )


def generate(spec: ScenarioSpec, out_dir: str | Path) -> dict[str, int]:
    """Write the scenario's fixture tree; returns per-source line counts."""
    out_dir = Path(out_dir)
    grouped: dict[tuple[str, str], list[str]] = {}
    for event in build_events(spec):
        kind = event_kind(event).value
        source = SOURCE_FOR_KIND[kind]
        grouped.setdefault((source, kind), []).append(event_to_json(event))
    counts: dict[str, int] = {}
    for (source, kind), lines in sorted(grouped.items()):
        source_dir = out_dir / source
        source_dir.mkdir(parents=True, exist_ok=True)
        (source_dir / f"{kind}.jsonl").write_text(
            "".join(line + "\n" for line in lines), encoding="utf-8"
        )
        counts[source] = counts.get(source, 0) + len(lines)
    return counts
