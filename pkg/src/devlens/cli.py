"""Single entry point: serve the platform, run one-shot passes, generate
scenarios, and export reports.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import sys
from datetime import datetime

import click

from . import scenario
from .config import ConfigError, PlatformConfig, load_config
from .domain import Granularity, MetricId, Scope, ValidationError, parse_rfc3339
from .report import render_figure, report_rows, write_csv, write_json
from .scheduler import FinalStatus
from .service import Service
from .storage import Store


def _load(config_path: str) -> PlatformConfig:
    try:
        return load_config(config_path)
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc


def _parse_ts(value: str | None, option: str) -> datetime | None:
    if value is None:
        return None
    try:
        return parse_rfc3339(value)
    except ValidationError:
        try:
            from datetime import timezone

            return datetime.fromisoformat(value).replace(tzinfo=timezone.utc)
        except ValueError:
            raise click.UsageError(f"{option}: not a date or RFC 3339 timestamp: {value!r}")


def _parse_metric(name: str) -> MetricId:
    try:
        return MetricId(name)
    except ValueError:
        raise click.UsageError(f"unknown metric: {name!r}") from None


def _parse_scope(text: str) -> Scope:
    try:
        return Scope.parse(text)
    except ValidationError as exc:
        raise click.UsageError(str(exc)) from None


@click.group()
def main() -> None:
    """Engineering telemetry platform: ingest, compute, alert, serve."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Platform config JSON.")
def serve(config_path: str) -> None:
    """Run the scheduler, both HTTP APIs, and post-run alerting until interrupted."""
    config = _load(config_path)
    service = Service(config)
    click.echo(
        f"serving on http://{config.query_api.host}:{config.query_api.port} "
        f"({len(config.sources)} sources, {len(config.rules)} alert rules)"
    )
    service.serve()


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--source", "source_id", default=None, help="Single source to ingest.")
@click.option("--once", is_flag=True, default=True, help="Run one pass and exit (default).")
def ingest(config_path: str, source_id: str | None, once: bool) -> None:
    """One-shot ingestion pass over one source or all of them."""
    config = _load(config_path)
    service = Service(config)
    try:
        if source_id is not None and source_id not in service.registry:
            raise click.UsageError(f"unknown source: {source_id!r}")
        runs = service.ingest_once([source_id] if source_id else None)
        failed = False
        for run in runs:
            click.echo(
                f"{run.source_id}: {run.final_status.value} "
                f"(attempts {len(run.attempts)}, stored {run.records_stored})"
            )
            failed = failed or run.final_status is FinalStatus.EXHAUSTED
        if failed:
            raise click.ClickException("one or more sources exhausted their retries")
    finally:
        service.close()


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--window", "window_range", default=None,
              help="Restrict to an inclusive range, e.g. 2024-03-04/2024-03-18.")
@click.option("--granularity", default=None,
              type=click.Choice(["daily", "weekly", "monthly"]),
              help="Restrict to one granularity (default: all configured).")
def process(config_path: str, window_range: str | None, granularity: str | None) -> None:
    """Recompute metrics from the raw store and evaluate alert rules."""
    config = _load(config_path)
    service = Service(config)
    try:
        request = service.default_request()
        if request is None:
            click.echo("0 points (raw store is empty)")
            return
        if granularity is not None:
            request = _restrict_granularity(request, Granularity(granularity))
        if window_range is not None:
            request = _restrict_range(request, window_range)
        report = service.process_once(request)
        click.echo(
            f"{report.points_upserted} points "
            f"({report.events_loaded} events, {report.unparseable_payloads} unparseable payloads)"
        )
    finally:
        service.close()


def _restrict_granularity(request, granularity: Granularity):
    from dataclasses import replace

    windows = tuple(w for w in request.windows if w.granularity is granularity)
    if not windows:
        raise click.UsageError(f"no {granularity.value} windows cover the stored data")
    return replace(request, windows=windows)


def _restrict_range(request, window_range: str):
    from dataclasses import replace

    try:
        start_text, end_text = window_range.split("/")
    except ValueError:
        raise click.UsageError("--window must look like <start>/<end>") from None
    start = _parse_ts(start_text, "--window")
    end = _parse_ts(end_text, "--window")
    windows = tuple(w for w in request.windows if w.start >= start and w.start < end)
    if not windows:
        raise click.UsageError("no windows fall inside --window")
    return replace(request, windows=windows)


@main.command()
@click.option("--preset", "preset_name", required=True,
              type=click.Choice(["steady", "fig3-incident", "crash-spike"]))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", default=None, type=int, help="Override the preset seed.")
def generate(preset_name: str, out_dir: str, seed: int | None) -> None:
    """Write a deterministic fixture tree for a named scenario."""
    spec = scenario.preset(preset_name)
    if seed is not None:
        from dataclasses import replace

        spec = replace(spec, seed=seed)
    counts = scenario.generate(spec, out_dir)
    for source, count in sorted(counts.items()):
        click.echo(f"{source}: {count} events")
    click.echo(f"total: {sum(counts.values())} events in {out_dir}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--metric", "metric_name", required=True)
@click.option("--scope", "scope_text", default="org", show_default=True)
@click.option("--from", "start_text", default=None, help="Window-start lower bound.")
@click.option("--to", "end_text", default=None, help="Window-start upper bound (exclusive).")
@click.option("--granularity", default="daily", show_default=True,
              type=click.Choice(["daily", "weekly", "monthly"]))
@click.option("--format", "fmt", default="csv", show_default=True,
              type=click.Choice(["json", "csv"]))
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Write to a file instead of stdout.")
@click.option("--figure", "figure_path", default=None, type=click.Path(),
              help="Also render a PNG figure of the series.")
@click.option("--overlay", "overlay_name", default=None,
              help="Second metric drawn on a twin axis in the figure.")
def report(
    config_path: str,
    metric_name: str,
    scope_text: str,
    start_text: str | None,
    end_text: str | None,
    granularity: str,
    fmt: str,
    out_path: str | None,
    figure_path: str | None,
    overlay_name: str | None,
) -> None:
    """Export one metric series as CSV or JSON, optionally with a figure."""
    config = _load(config_path)
    metric = _parse_metric(metric_name)
    scope = _parse_scope(scope_text)
    start = _parse_ts(start_text, "--from")
    end = _parse_ts(end_text, "--to")
    store = Store(config.store_path)
    try:
        rows = report_rows(store, metric, scope, Granularity(granularity), start, end)
        if out_path:
            with open(out_path, "w", encoding="utf-8", newline="") as handle:
                (write_csv if fmt == "csv" else write_json)(rows, handle)
            click.echo(f"{len(rows)} rows -> {out_path}")
        else:
            (write_csv if fmt == "csv" else write_json)(rows, sys.stdout)
        if figure_path:
            points = store.query_metric(metric, scope, Granularity(granularity), start, end)
            if not points:
                raise click.ClickException("no points to plot")
            overlay = None
            if overlay_name:
                overlay_metric = _parse_metric(overlay_name)
                if overlay_metric is metric:
                    raise click.UsageError("--overlay must name a different metric")
                overlay = (
                    overlay_metric,
                    store.query_metric(overlay_metric, scope, Granularity(granularity), start, end),
                )
            render_figure(
                points,
                metric,
                scope,
                figure_path,
                thresholds=config.thresholds_by_metric().get(metric, []),
                overlay=overlay,
            )
            click.echo(f"figure -> {figure_path}")
    finally:
        store.close()


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--namespace", required=True, type=click.Choice(["raw", "processed"]))
@click.option("--out", "out_path", default=None, type=click.Path())
def export(config_path: str, namespace: str, out_path: str | None) -> None:
    """Dump a store namespace as JSON-lines for inspection."""
    config = _load(config_path)
    store = Store(config.store_path)
    try:
        if out_path:
            with open(out_path, "w", encoding="utf-8") as handle:
                count = store.export(namespace, handle)
            click.echo(f"{count} records -> {out_path}")
        else:
            store.export(namespace, sys.stdout)
    finally:
        store.close()


if __name__ == "__main__":
    main()
