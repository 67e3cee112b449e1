"""Minimal five-field cron expression parsing and firing-time iteration.

Supports the classic "minute hour day-of-month month day-of-week" grammar
with *, lists, ranges, and /step. Day-of-week uses 0 or 7 for Sunday. When
both day fields are restricted, a date matches if either one does.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, timedelta
from typing import Iterator

from .domain import UTC


class CronError(ValueError):
    """Raised for unparseable cron expressions."""


_BOUNDS = {
    "minute": (0, 59),
    "hour": (0, 23),
    "day-of-month": (1, 31),
    "month": (1, 12),
    "day-of-week": (0, 7),
}


def _parse_field(text: str, name: str) -> tuple[frozenset[int], bool]:
    """Parse one field; returns (allowed values, was-wildcard)."""
    low, high = _BOUNDS[name]
    values: set[int] = set()
    wildcard = False
    for part in text.split(","):
        body, _, step_text = part.partition("/")
        step = 1
        if step_text:
            if not step_text.isdigit() or int(step_text) < 1:
                raise CronError(f"bad step in {name}: {part!r}")
            step = int(step_text)
        if body == "*":
            if step == 1 and "," not in text:
                wildcard = True
            start, stop = low, high
        elif "-" in body:
            try:
                start_s, stop_s = body.split("-")
                start, stop = int(start_s), int(stop_s)
            except ValueError:
                raise CronError(f"bad range in {name}: {part!r}") from None
        elif body.isdigit():
            start = stop = int(body)
        else:
            raise CronError(f"bad value in {name}: {part!r}")
        if not (low <= start <= high and low <= stop <= high and start <= stop):
            raise CronError(f"{name} value out of range in {part!r}")
        values.update(range(start, stop + 1, step))
    if name == "day-of-week" and 7 in values:
        values.discard(7)
        values.add(0)
    return frozenset(values), wildcard


@dataclass(frozen=True, slots=True)
class CronSchedule:
    expression: str
    minutes: frozenset[int]
    hours: frozenset[int]
    days_of_month: frozenset[int]
    months: frozenset[int]
    days_of_week: frozenset[int]
    dom_any: bool
    dow_any: bool

    def _day_matches(self, day: date) -> bool:
        in_dom = day.day in self.days_of_month
        in_dow = day.weekday() in self._weekdays()
        if self.dom_any and self.dow_any:
            return True
        if self.dom_any:
            return in_dow
        if self.dow_any:
            return in_dom
        return in_dom or in_dow

    def _weekdays(self) -> frozenset[int]:
        # cron counts Sunday as 0; datetime.weekday counts Monday as 0
        return frozenset((d - 1) % 7 for d in self.days_of_week)

    def matches(self, ts: datetime) -> bool:
        ts = ts.astimezone(UTC)
        return (
            ts.minute in self.minutes
            and ts.hour in self.hours
            and ts.month in self.months
            and self._day_matches(ts.date())
        )

    def next_fire(self, after: datetime) -> datetime:
        """First firing time strictly after the given instant."""
        t = after.astimezone(UTC).replace(second=0, microsecond=0) + timedelta(minutes=1)
        for _ in range(366 * 8 + 36):  # day-level skipping bounds the search
            if t.month not in self.months:
                if t.month == 12:
                    t = t.replace(year=t.year + 1, month=1, day=1, hour=0, minute=0)
                else:
                    t = t.replace(month=t.month + 1, day=1, hour=0, minute=0)
                continue
            if not self._day_matches(t.date()):
                t = (t + timedelta(days=1)).replace(hour=0, minute=0)
                continue
            if t.hour not in self.hours:
                later = [h for h in self.hours if h > t.hour]
                if later:
                    t = t.replace(hour=min(later), minute=0)
                else:
                    t = (t + timedelta(days=1)).replace(hour=0, minute=0)
                continue
            if t.minute not in self.minutes:
                later = [m for m in self.minutes if m > t.minute]
                if later:
                    t = t.replace(minute=min(later))
                else:
                    t = (t + timedelta(hours=1)).replace(minute=0)
                continue
            return t
        raise CronError(f"no firing found for {self.expression!r}")

    def fires_between(self, after: datetime, until: datetime) -> Iterator[datetime]:
        """Firing times in the half-open interval (after, until]."""
        t = after
        while True:
            t = self.next_fire(t)
            if t > until:
                return
            yield t


def parse_cron(expression: str) -> CronSchedule:
    parts = expression.split()
    if len(parts) != 5:
        raise CronError(f"cron expression needs 5 fields: {expression!r}")
    minutes, _ = _parse_field(parts[0], "minute")
    hours, _ = _parse_field(parts[1], "hour")
    dom, dom_any = _parse_field(parts[2], "day-of-month")
    months, _ = _parse_field(parts[3], "month")
    dow, dow_any = _parse_field(parts[4], "day-of-week")
    return CronSchedule(
        expression=expression,
        minutes=minutes,
        hours=hours,
        days_of_month=dom,
        months=months,
        days_of_week=dow,
        dom_any=dom_any,
        dow_any=dow_any,
    )
