"""RBAC-guarded read API over processed metrics with TTL result caching.

Serves ordered metric series with freshness stamps, raw-record drill-down
for points a principal may inspect, and the metric catalog filtered to
the caller's readable set. Successful series reads are cached per request
fingerprint until their TTL expires (X-Cache: hit|miss).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Any

from fastapi import APIRouter, Request
from fastapi.responses import JSONResponse

from .clock import Clock
from .domain import (
    Granularity,
    MetricId,
    Scope,
    TimeWindow,
    ValidationError,
    format_rfc3339,
    parse_rfc3339,
    serialize_event,
    window_for,
)
from .ingest_api import bearer_secret
from .metrics import EngineConfig, collect_sample, catalog_document
from .rbac import AccessControl, Principal
from .storage import MetricPoint, Store


@dataclass(frozen=True, slots=True)
class CacheEntry:
    body: dict
    last_updated: str | None
    expires_at: datetime


class TTLCache:
    """Request-fingerprint cache; entries serve until their TTL elapses."""

    def __init__(
        self,
        clock: Clock,
        default_ttl_seconds: float,
        per_metric_ttl_seconds: dict[MetricId, float] | None = None,
    ):
        self.clock = clock
        self.default_ttl = default_ttl_seconds
        self.per_metric = per_metric_ttl_seconds or {}
        self._entries: dict[tuple, CacheEntry] = {}
        self._lock = threading.Lock()

    def ttl_for(self, metric_id: MetricId) -> float:
        return self.per_metric.get(metric_id, self.default_ttl)

    def get(self, key: tuple) -> CacheEntry | None:
        with self._lock:
            entry = self._entries.get(key)
            if entry is None or self.clock.now() >= entry.expires_at:
                return None
            return entry

    def put(self, key: tuple, metric_id: MetricId, body: dict, last_updated: str | None) -> None:
        expires = self.clock.now() + timedelta(seconds=self.ttl_for(metric_id))
        with self._lock:
            self._entries[key] = CacheEntry(
                body=body, last_updated=last_updated, expires_at=expires
            )


def _error(status: int, detail: str) -> JSONResponse:
    return JSONResponse({"detail": detail}, status_code=status)


def _point_doc(point: MetricPoint) -> dict[str, Any]:
    return {
        "window-start": format_rfc3339(point.window.start),
        "window-end": format_rfc3339(point.window.end),
        "value": point.value,
        "sample-size": point.sample_size,
        "computed-at": format_rfc3339(point.computed_at),
    }


def build_query_router(
    store: Store,
    access: AccessControl,
    engine_config: EngineConfig,
    *,
    cache: TTLCache,
    thresholds: dict[MetricId, list[dict]] | None = None,
    boards: list | None = None,
) -> APIRouter:
    router = APIRouter()

    def _principal(request: Request) -> Principal | None:
        return access.authenticate(bearer_secret(request))

    def _parse_metric(metric_id: str) -> MetricId | None:
        try:
            return MetricId(metric_id)
        except ValueError:
            return None

    @router.get("/metrics/{metric_id}")
    def metric_series(metric_id: str, request: Request) -> JSONResponse:
        principal = _principal(request)
        if principal is None:
            return _error(401, "missing or invalid token")
        metric = _parse_metric(metric_id)
        if metric is None:
            return _error(404, f"unknown metric-id {metric_id!r}")
        params = request.query_params
        try:
            scope = Scope.parse(params.get("scope", "org"))
            granularity = Granularity(params.get("granularity", "daily"))
            start = parse_rfc3339(params["from"]) if "from" in params else None
            end = parse_rfc3339(params["to"]) if "to" in params else None
        except (ValidationError, ValueError) as exc:
            return _error(400, f"invalid parameters: {exc}")
        if start is not None and end is not None and start >= end:
            return _error(400, "invalid parameters: from must precede to")
        if not principal.can_read(metric, scope):
            return _error(403, f"not permitted to read {metric.value} at {scope.key}")

        key = (metric.value, scope.key, granularity.value, params.get("from"), params.get("to"))
        cached = cache.get(key)
        if cached is not None:
            headers = {"X-Cache": "hit"}
            if cached.last_updated:
                headers["X-Last-Updated"] = cached.last_updated
            return JSONResponse(cached.body, headers=headers)

        points = store.query_metric(metric, scope, granularity, start=start, end=end)
        stamp = store.freshness(metric, scope)
        last_updated = format_rfc3339(stamp.last_updated) if stamp else None
        body = {
            "metric-id": metric.value,
            "scope": scope.key,
            "granularity": granularity.value,
            "points": [_point_doc(p) for p in points],
            "last-updated": last_updated,
        }
        cache.put(key, metric, body, last_updated)
        headers = {"X-Cache": "miss"}
        if last_updated:
            headers["X-Last-Updated"] = last_updated
        return JSONResponse(body, headers=headers)

    @router.get("/metrics/{metric_id}/drilldown")
    def drilldown(metric_id: str, request: Request) -> JSONResponse:
        principal = _principal(request)
        if principal is None:
            return _error(401, "missing or invalid token")
        metric = _parse_metric(metric_id)
        if metric is None:
            return _error(404, f"unknown metric-id {metric_id!r}")
        params = request.query_params
        try:
            scope = Scope.parse(params.get("scope", "org"))
            granularity = Granularity(params.get("granularity", "daily"))
            anchor = parse_rfc3339(params["window-start"])
        except KeyError:
            return _error(400, "invalid parameters: window-start is required")
        except (ValidationError, ValueError) as exc:
            return _error(400, f"invalid parameters: {exc}")
        if not principal.can_read(metric, scope):
            return _error(403, f"not permitted to read {metric.value} at {scope.key}")
        if not principal.can_drilldown():
            return _error(403, "raw drill-down not permitted for this principal")

        window: TimeWindow = window_for(anchor, granularity)
        stored = store.query_metric(metric, scope, granularity, start=window.start, end=window.end)
        if not stored:
            return _error(404, "no metric point for that window")
        point = stored[0]
        result = collect_sample(store, metric, scope, window, engine_config)
        records = []
        if result is not None:
            for se in result.sample:
                records.append(
                    {
                        "source-id": se.source_id,
                        "natural-key": se.natural_key,
                        "version": se.version,
                        "fetched-at": format_rfc3339(se.fetched_at),
                        "event": serialize_event(se.event),
                    }
                )
        return JSONResponse(
            {
                "metric-id": metric.value,
                "scope": scope.key,
                "window-start": format_rfc3339(window.start),
                "window-end": format_rfc3339(window.end),
                "value": point.value,
                "sample-size": point.sample_size,
                "records": records,
            }
        )

    @router.get("/catalog")
    def catalog(request: Request) -> JSONResponse:
        principal = _principal(request)
        if principal is None:
            return _error(401, "missing or invalid token")
        readable = principal.readable_metrics()
        document = catalog_document(thresholds)
        document["metrics"] = [
            entry for entry in document["metrics"] if MetricId(entry["metric-id"]) in readable
        ]
        return JSONResponse(document)

    @router.get("/boards")
    def board_config(request: Request) -> JSONResponse:
        principal = _principal(request)
        if principal is None:
            return _error(401, "missing or invalid token")
        return JSONResponse({"boards": boards or []})

    return router
