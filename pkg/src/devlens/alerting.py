"""Threshold evaluation over computed metric points and notification delivery.

Rules compare numeric metric values against thresholds; breaches become
alert events delivered to pluggable sinks (webhook POST, append-to-file,
standard output). A per-rule cooldown suppresses repeat fires so hourly
recomputation does not spam the channel.
"""

from __future__ import annotations

import json
import logging
import math
import operator
import urllib.error
import urllib.request
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from .domain import (
    MetricId,
    Scope,
    ScopeSelector,
    ValidationError,
    format_rfc3339,
    is_numeric,
)
from .storage import MetricPoint

logger = logging.getLogger(__name__)


class Comparator(str, Enum):
    GT = "gt"
    GE = "ge"
    LT = "lt"
    LE = "le"


_COMPARE: dict[Comparator, Callable[[float, float], bool]] = {
    Comparator.GT: operator.gt,
    Comparator.GE: operator.ge,
    Comparator.LT: operator.lt,
    Comparator.LE: operator.le,
}


@dataclass(frozen=True, slots=True)
class AlertRule:
    rule_id: str
    metric_id: MetricId
    scope_selector: ScopeSelector
    comparator: Comparator
    threshold: float
    channel: str
    cooldown: timedelta = timedelta(hours=24)

    def __post_init__(self) -> None:
        if not self.rule_id:
            raise ValidationError("rule-id must be non-empty")
        if not math.isfinite(self.threshold):
            raise ValidationError(f"rule {self.rule_id}: threshold must be finite")
        if self.cooldown < timedelta(0):
            raise ValidationError(f"rule {self.rule_id}: cooldown must be non-negative")
        if not is_numeric(self.metric_id):
            raise ValidationError(
                f"rule {self.rule_id}: metric {self.metric_id.value} is not numeric-valued"
            )

    def breached_by(self, point: MetricPoint) -> bool:
        return (
            point.metric_id is self.metric_id
            and self.scope_selector.matches(point.scope)
            and _COMPARE[self.comparator](point.value, self.threshold)
        )


@dataclass(frozen=True, slots=True)
class AlertEvent:
    rule: AlertRule
    point: MetricPoint
    fired_at: datetime

    def __post_init__(self) -> None:
        if not self.rule.breached_by(self.point):
            raise ValidationError("alert event requires a verifiably breaching point")

    @property
    def message(self) -> str:
        return (
            f"alert {self.rule.rule_id}: {self.point.metric_id.value}"
            f"[{self.point.scope.key}] = {self.point.value:g}"
            f" {self.rule.comparator.value} threshold {self.rule.threshold:g}"
        )

    def to_notification(self) -> "Notification":
        window = self.point.window
        return Notification(
            kind="alert",
            text=self.message,
            body={
                "rule-id": self.rule.rule_id,
                "metric-id": self.point.metric_id.value,
                "scope": self.point.scope.key,
                "window": f"{format_rfc3339(window.start)}/{format_rfc3339(window.end)}",
                "value": self.point.value,
                "threshold": self.rule.threshold,
                "fired-at": format_rfc3339(self.fired_at),
            },
        )


@dataclass(frozen=True, slots=True)
class Notification:
    """One deliverable message: a flat JSON body plus rendered text."""

    kind: str
    text: str
    body: Mapping[str, Any]


FireHistory = Mapping[str, datetime]


def evaluate(
    points: Sequence[MetricPoint],
    rules: Sequence[AlertRule],
    history: FireHistory,
    now: datetime,
) -> tuple[list[AlertEvent], dict[str, datetime]]:
    """Pure breach evaluation: returns fired events and the updated history.

    A rule fires once per breaching point unless it already fired within
    its cooldown (history carries last fire times across runs).
    """
    new_history = dict(history)
    events: list[AlertEvent] = []
    for rule in rules:
        for point in points:
            if not rule.breached_by(point):
                continue
            last = new_history.get(rule.rule_id)
            if last is not None and now - last < rule.cooldown:
                continue
            events.append(AlertEvent(rule=rule, point=point, fired_at=now))
            new_history[rule.rule_id] = now
    return events, new_history


# ---------------------------------------------------------------------------
# Sinks
# ---------------------------------------------------------------------------

class SinkError(Exception):
    """A delivery attempt failed."""


class StdoutSink:
    def deliver(self, notification: Notification) -> None:
        print(notification.text, flush=True)


class FileSink:
    def __init__(self, path: str | Path):
        self.path = Path(path)

    def deliver(self, notification: Notification) -> None:
        line = json.dumps(
            {**notification.body, "message": notification.text}, sort_keys=True
        )
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")
        except OSError as exc:
            raise SinkError(f"file sink {self.path}: {exc}") from exc


class WebhookSink:
    def __init__(self, url: str, timeout: float = 5.0):
        self.url = url
        self.timeout = timeout

    def deliver(self, notification: Notification) -> None:
        payload = json.dumps(dict(notification.body)).encode("utf-8")
        request = urllib.request.Request(
            self.url, data=payload, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                if response.status >= 400:
                    raise SinkError(f"webhook {self.url}: HTTP {response.status}")
        except (urllib.error.URLError, OSError) as exc:
            raise SinkError(f"webhook {self.url}: {exc}") from exc


@dataclass(frozen=True, slots=True)
class DeliveryResult:
    channel: str
    delivered: bool
    attempts: int
    error: str = ""


def notify(notification: Notification, sink: Any, *, channel: str = "") -> DeliveryResult:
    """Deliver with at-least-once semantics: one retry, failures recorded."""
    error = ""
    for attempt in (1, 2):
        try:
            sink.deliver(notification)
            return DeliveryResult(channel=channel, delivered=True, attempts=attempt)
        except SinkError as exc:
            error = str(exc)
            logger.warning("notification delivery failed (attempt %d): %s", attempt, exc)
    return DeliveryResult(channel=channel, delivered=False, attempts=2, error=error)


class Notifier:
    """Routes notifications to named channels; never raises on delivery failure."""

    def __init__(self, channels: Mapping[str, Any]):
        self.channels = dict(channels)
        self.results: list[DeliveryResult] = []

    def send(self, channel: str, notification: Notification) -> DeliveryResult:
        try:
            sink = self.channels[channel]
        except KeyError:
            raise ValidationError(f"unknown notification channel: {channel!r}") from None
        result = notify(notification, sink, channel=channel)
        self.results.append(result)
        return result
