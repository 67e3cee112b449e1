"""Report extraction: ordered metric series as CSV/JSON plus rendered figures.

The figure path uses matplotlib's Agg backend so reports render headless;
numeric metrics get a trend line with threshold guides, distribution
metrics a stacked bar per window.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime
from pathlib import Path
from typing import IO, Sequence

from .domain import (
    Granularity,
    MetricId,
    Scope,
    ValueKind,
    format_rfc3339,
    value_kind,
)
from .storage import MetricPoint, Store

CSV_COLUMNS = ("window-start", "window-end", "value", "sample-size", "computed-at")


def report_rows(
    store: Store,
    metric_id: MetricId,
    scope: Scope,
    granularity: Granularity,
    start: datetime | None = None,
    end: datetime | None = None,
) -> list[dict]:
    points = store.query_metric(metric_id, scope, granularity, start=start, end=end)
    rows = []
    for point in points:
        value = point.value
        if isinstance(value, dict):
            value = json.dumps(value, sort_keys=True, separators=(",", ":"))
        rows.append(
            {
                "window-start": format_rfc3339(point.window.start),
                "window-end": format_rfc3339(point.window.end),
                "value": value,
                "sample-size": point.sample_size,
                "computed-at": format_rfc3339(point.computed_at),
            }
        )
    return rows


def write_csv(rows: Sequence[dict], stream: IO[str]) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    writer.writerows(rows)


def write_json(rows: Sequence[dict], stream: IO[str]) -> None:
    json.dump(list(rows), stream, indent=2)
    stream.write("\n")


def _window_labels(points: Sequence[MetricPoint]) -> list[str]:
    return [point.window.start.strftime("%Y-%m-%d") for point in points]


def render_figure(
    points: Sequence[MetricPoint],
    metric_id: MetricId,
    scope: Scope,
    out_path: str | Path,
    *,
    thresholds: Sequence[dict] = (),
    overlay: tuple[MetricId, Sequence[MetricPoint]] | None = None,
) -> Path:
    """Render a trend (or stacked-bar) figure for one metric series.

    With an overlay series, both metrics share the x axis on dual y axes,
    mirroring the incident-correlation view.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(9, 4.5))
    labels = _window_labels(points)

    if value_kind(metric_id) is ValueKind.NUMBER:
        values = [point.value for point in points]
        ax.plot(labels, values, marker="o", color="tab:blue", label=metric_id.value)
        for guide in thresholds:
            ax.axhline(
                guide["threshold"],
                color="tab:red",
                linestyle="--",
                linewidth=1,
                label=f"threshold {guide['comparator']} {guide['threshold']:g}",
            )
        ax.set_ylabel(metric_id.value)
    else:
        categories = sorted({key for point in points for key in point.value})
        bottoms = [0.0] * len(points)
        for category in categories:
            heights = [point.value.get(category, 0) for point in points]
            ax.bar(labels, heights, bottom=bottoms, label=category)
            bottoms = [b + h for b, h in zip(bottoms, heights)]
        ax.set_ylabel("count")

    if overlay is not None:
        overlay_id, overlay_points = overlay
        twin = ax.twinx()
        twin.plot(
            _window_labels(overlay_points),
            [point.value for point in overlay_points],
            marker="s",
            linestyle="--",
            color="tab:red",
            label=overlay_id.value,
        )
        twin.set_ylabel(overlay_id.value)
        twin.legend(loc="upper right")

    ax.set_title(f"{metric_id.value} [{scope.key}]")
    ax.set_xlabel("window start")
    ax.tick_params(axis="x", rotation=45)
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
