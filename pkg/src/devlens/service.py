"""Wires storage, connectors, scheduler, processing, alerting, and the HTTP app.

One Service owns the whole pipeline: scheduled (or one-shot) ingestion,
full recomputation after successful fetches, alert evaluation over the
freshly computed points, and the combined ingest/query HTTP application.
"""

from __future__ import annotations

import json
import logging
import signal
import threading
from datetime import datetime
from pathlib import Path

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from . import alerting
from .clock import Clock
from .config import PlatformConfig, SourceConfig
from .connectors import Connector, ConnectorRegistry, FixtureConnector, HttpConnector
from .domain import format_rfc3339, parse_rfc3339, windows_between, Granularity
from .ingest_api import build_ingest_router
from .metrics import (
    ComputationRequest,
    ProcessingReport,
    data_span,
    discover_scopes,
    load_events,
    run_processing,
)
from .query_api import TTLCache, build_query_router
from .scheduler import JobRun, Scheduler
from .storage import Store

logger = logging.getLogger(__name__)


def build_connector(
    source: SourceConfig, config: PlatformConfig, clock: Clock
) -> Connector:
    if source.connector_kind == "http":
        return HttpConnector(
            source.url, config.platforms, token=source.token, clock=clock
        )
    return FixtureConnector(config.fixture_root, config.platforms, clock=clock)


def build_app(config: PlatformConfig, store: Store, clock: Clock) -> FastAPI:
    app = FastAPI(title="devlens", docs_url=None, redoc_url=None)
    if config.query_api.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.query_api.cors_origins),
            allow_methods=["GET", "POST"],
            allow_headers=["Authorization", "Content-Type"],
            expose_headers=["X-Cache", "X-Last-Updated"],
        )
    app.include_router(
        build_ingest_router(
            store,
            config.ingest_api.tokens,
            config.platforms,
            max_body_bytes=config.ingest_api.max_body_bytes,
            clock=clock,
        )
    )
    cache = TTLCache(
        clock,
        config.query_api.default_ttl_seconds,
        config.query_api.per_metric_ttl_seconds,
    )
    app.include_router(
        build_query_router(
            store,
            config.query_api.access,
            config.engine,
            cache=cache,
            thresholds=config.thresholds_by_metric(),
            boards=config.boards,
        )
    )
    if config.dashboard_dist is not None and Path(config.dashboard_dist).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=config.dashboard_dist, html=True), name="app")
    return app


class Service:
    """The assembled platform, ready to run one-shot commands or serve."""

    def __init__(self, config: PlatformConfig, *, clock: Clock | None = None):
        self.config = config
        self.clock = clock or Clock()
        self.store = Store(config.store_path)
        self.notifier = alerting.Notifier(
            {
                name: channel.build_sink(config.base_dir)
                for name, channel in config.channels.items()
            }
        )
        self.registry = ConnectorRegistry()
        for source in config.sources:
            self.registry.register(
                source.descriptor, build_connector(source, config, self.clock)
            )
        self._dirty = threading.Event()
        self.scheduler = Scheduler(
            self.registry,
            self.store,
            policy=config.scheduler.retry,
            clock=self.clock,
            state_path=config.scheduler_state_path,
            parallelism=config.scheduler.parallelism,
            notify=self._notify_operational,
            on_complete=self._on_job_complete,
            credential_warn_horizon=config.scheduler.credential_warn,
        )
        self.app = build_app(config, self.store, self.clock)

    def close(self) -> None:
        self.scheduler.shutdown()
        self.store.close()

    # -- notifications ------------------------------------------------------

    def _notify_operational(self, notification: alerting.Notification) -> None:
        self.notifier.send(self.config.failure_channel, notification)

    def _on_job_complete(self, run: JobRun) -> None:
        if run.records_stored:
            self._dirty.set()

    # -- one-shot operations -------------------------------------------------

    def ingest_once(self, source_ids: list[str] | None = None) -> list[JobRun]:
        ids = source_ids or [s.source_id for s in self.registry.sources()]
        return [self.scheduler.run_source(source_id) for source_id in ids]

    def default_request(self) -> ComputationRequest | None:
        """All metrics over the scopes and windows observed in the raw data."""
        events, _ = load_events(self.store, self.config.platforms)
        span = data_span(events)
        if span is None:
            return None
        from .domain import MetricId

        windows = []
        for name in self.config.granularities:
            windows.extend(windows_between(span[0], span[1], Granularity(name)))
        return ComputationRequest(
            metric_ids=frozenset(MetricId),
            scopes=tuple(discover_scopes(events)),
            windows=tuple(windows),
        )

    def process_once(
        self, request: ComputationRequest | None = None, now: datetime | None = None
    ) -> ProcessingReport:
        """Recompute metrics, then evaluate alert rules on the new points."""
        now = now or self.clock.now()
        request = request or self.default_request()
        if request is None:
            return ProcessingReport()
        report = run_processing(self.store, request, self.config.engine, now)
        self._evaluate_alerts(report, now)
        return report

    def _evaluate_alerts(self, report: ProcessingReport, now: datetime) -> None:
        if not self.config.rules:
            return
        history = self._load_alert_history()
        events, history = alerting.evaluate(report.points, self.config.rules, history, now)
        for event in events:
            self.notifier.send(event.rule.channel, event.to_notification())
        self._save_alert_history(history)

    def _load_alert_history(self) -> dict[str, datetime]:
        path = self.config.alert_state_path
        if not path.exists():
            return {}
        doc = json.loads(path.read_text(encoding="utf-8"))
        return {rule_id: parse_rfc3339(ts) for rule_id, ts in doc.items()}

    def _save_alert_history(self, history: dict[str, datetime]) -> None:
        path = self.config.alert_state_path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(
                {rule_id: format_rfc3339(ts) for rule_id, ts in sorted(history.items())},
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )

    # -- long-running mode ---------------------------------------------------

    def serve(self) -> None:
        """Run scheduler ticks, both HTTP APIs, and post-run alerting until
        interrupted; a clean shutdown flushes scheduler state."""
        import uvicorn

        uv_config = uvicorn.Config(
            self.app,
            host=self.config.query_api.host,
            port=self.config.query_api.port,
            log_level="warning",
        )
        server = uvicorn.Server(uv_config)
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()

        stop = threading.Event()

        def _handle(signum, frame):
            stop.set()

        previous = {}
        for sig in (signal.SIGINT, signal.SIGTERM):
            previous[sig] = signal.signal(sig, _handle)
        try:
            if self.config.scheduler.run_on_start:
                logger.info("initial ingestion pass")
                self.ingest_once()
                self.process_once()
            while not stop.is_set():
                stop.wait(self.config.scheduler.tick_interval_seconds)
                if stop.is_set():
                    break
                self.scheduler.tick(self.clock.now())
                if self._dirty.is_set():
                    self._dirty.clear()
                    self.process_once()
        finally:
            for sig, handler in previous.items():
                signal.signal(sig, handler)
            server.should_exit = True
            thread.join(timeout=10)
            self.close()
