"""Platform configuration: one JSON document covering sources, schedules,
retry policy, thresholds, alert rules, tokens, roles, and cache TTLs.

Validation errors name the offending key path so a bad config fails fast
with an actionable diagnostic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path
from typing import Any

from .alerting import AlertRule, Comparator, FileSink, StdoutSink, WebhookSink
from .connectors import SourceDescriptor
from .cron import CronError, parse_cron
from .domain import MetricId, ScopeSelector, ValidationError, parse_rfc3339
from .metrics import EngineConfig
from .rbac import AccessControl, ApiToken, Principal, Role
from .scheduler import RetryPolicy


class ConfigError(ValueError):
    """Configuration problem, annotated with the offending key path."""


class _Ctx:
    """Typed accessor over a JSON object that tracks its key path."""

    def __init__(self, doc: Any, path: str = ""):
        if not isinstance(doc, dict):
            raise ConfigError(f"{path or 'config'}: expected an object")
        self.doc = doc
        self.path = path

    def _at(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def get(self, key: str, kind: type, default: Any = ...) -> Any:
        if key not in self.doc:
            if default is ...:
                raise ConfigError(f"{self._at(key)}: required key missing")
            return default
        value = self.doc[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, kind) or (kind is not bool and isinstance(value, bool)):
            raise ConfigError(f"{self._at(key)}: expected {kind.__name__}")
        return value

    def child(self, key: str, default: Any = ...) -> "_Ctx":
        value = self.get(key, dict, default)
        return _Ctx(value, self._at(key))

    def list(self, key: str, default: Any = ...) -> list[tuple[Any, str]]:
        value = self.get(key, list, default)
        return [(item, f"{self._at(key)}[{i}]") for i, item in enumerate(value)]


@dataclass(frozen=True)
class SourceConfig:
    descriptor: SourceDescriptor
    connector_kind: str  # fixture | http | none
    url: str | None = None
    token: str | None = None


@dataclass(frozen=True)
class ChannelConfig:
    name: str
    kind: str  # stdout | file | webhook
    path: str | None = None
    url: str | None = None

    def build_sink(self, base_dir: Path):
        if self.kind == "stdout":
            return StdoutSink()
        if self.kind == "file":
            return FileSink(base_dir / self.path)
        return WebhookSink(self.url)


@dataclass(frozen=True)
class QueryApiConfig:
    host: str
    port: int
    cors_origins: tuple[str, ...]
    default_ttl_seconds: float
    per_metric_ttl_seconds: dict[MetricId, float]
    access: AccessControl


@dataclass(frozen=True)
class IngestApiConfig:
    max_body_bytes: int
    tokens: tuple[ApiToken, ...]


@dataclass(frozen=True)
class SchedulerConfig:
    parallelism: int
    tick_interval_seconds: float
    run_on_start: bool
    retry: RetryPolicy
    credential_warn: timedelta


@dataclass(frozen=True)
class PlatformConfig:
    base_dir: Path
    platforms: frozenset[str]
    store_path: Path
    scheduler_state_path: Path
    alert_state_path: Path
    fixture_root: Path
    engine: EngineConfig
    granularities: tuple[str, ...]
    scheduler: SchedulerConfig
    sources: tuple[SourceConfig, ...]
    channels: dict[str, ChannelConfig]
    failure_channel: str
    rules: tuple[AlertRule, ...]
    ingest_api: IngestApiConfig
    query_api: QueryApiConfig
    boards: list = field(default_factory=list)
    dashboard_dist: Path | None = None

    def thresholds_by_metric(self) -> dict[MetricId, list[dict]]:
        out: dict[MetricId, list[dict]] = {}
        for rule in self.rules:
            out.setdefault(rule.metric_id, []).append(
                {
                    "rule-id": rule.rule_id,
                    "comparator": rule.comparator.value,
                    "threshold": rule.threshold,
                }
            )
        return out


def _parse_metric(name: str, path: str) -> MetricId:
    try:
        return MetricId(name)
    except ValueError:
        raise ConfigError(f"{path}: unknown metric-id {name!r}") from None


def _parse_selector(doc: Any, path: str) -> ScopeSelector:
    try:
        return ScopeSelector.from_json(doc)
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _parse_sources(ctx: _Ctx, platforms: frozenset[str]) -> tuple[SourceConfig, ...]:
    sources = []
    seen = set()
    for item, path in ctx.list("sources", default=[]):
        sctx = _Ctx(item, path)
        source_id = sctx.get("source-id", str)
        if source_id in seen:
            raise ConfigError(f"{path}.source-id: duplicate source {source_id!r}")
        seen.add(source_id)
        schedule = sctx.get("schedule", str)
        try:
            parse_cron(schedule)
        except CronError as exc:
            raise ConfigError(f"{path}.schedule: {exc}") from None
        expiry_text = sctx.get("credential-expiry", str, None)
        try:
            expiry = parse_rfc3339(expiry_text) if expiry_text else None
        except ValidationError as exc:
            raise ConfigError(f"{path}.credential-expiry: {exc}") from None
        kind = sctx.get("connector", str, "fixture")
        if kind not in ("fixture", "http"):
            raise ConfigError(f"{path}.connector: unknown kind {kind!r}")
        url = sctx.get("url", str, None)
        if kind == "http" and not url:
            raise ConfigError(f"{path}.url: required for http connectors")
        sources.append(
            SourceConfig(
                descriptor=SourceDescriptor(
                    source_id=source_id, schedule=schedule, credential_expiry=expiry
                ),
                connector_kind=kind,
                url=url,
                token=sctx.get("token", str, None),
            )
        )
    return tuple(sources)


def _parse_alerting(ctx: _Ctx) -> tuple[dict[str, ChannelConfig], str, tuple[AlertRule, ...]]:
    channels: dict[str, ChannelConfig] = {}
    channels_ctx = ctx.child("channels", default={})
    for name in channels_ctx.doc:
        cctx = channels_ctx.child(name)
        kind = cctx.get("kind", str)
        if kind not in ("stdout", "file", "webhook"):
            raise ConfigError(f"{cctx.path}.kind: unknown sink kind {kind!r}")
        if kind == "file" and not cctx.get("path", str, None):
            raise ConfigError(f"{cctx.path}.path: required for file sinks")
        if kind == "webhook" and not cctx.get("url", str, None):
            raise ConfigError(f"{cctx.path}.url: required for webhook sinks")
        channels[name] = ChannelConfig(
            name=name,
            kind=kind,
            path=cctx.get("path", str, None),
            url=cctx.get("url", str, None),
        )
    if "stdout" not in channels:
        channels.setdefault("stdout", ChannelConfig(name="stdout", kind="stdout"))
    failure_channel = ctx.get("failure-channel", str, "stdout")
    if failure_channel not in channels:
        raise ConfigError(f"{ctx.path}.failure-channel: unknown channel {failure_channel!r}")
    rules = []
    seen_rules = set()
    for item, path in ctx.list("rules", default=[]):
        rctx = _Ctx(item, path)
        rule_id = rctx.get("rule-id", str)
        if rule_id in seen_rules:
            raise ConfigError(f"{path}.rule-id: duplicate rule {rule_id!r}")
        seen_rules.add(rule_id)
        metric = _parse_metric(rctx.get("metric-id", str), f"{path}.metric-id")
        comparator_name = rctx.get("comparator", str)
        try:
            comparator = Comparator(comparator_name)
        except ValueError:
            raise ConfigError(f"{path}.comparator: unknown comparator {comparator_name!r}") from None
        channel = rctx.get("channel", str)
        if channel not in channels:
            raise ConfigError(f"{path}.channel: unknown channel {channel!r}")
        try:
            rules.append(
                AlertRule(
                    rule_id=rule_id,
                    metric_id=metric,
                    scope_selector=_parse_selector(
                        rctx.doc.get("scope", "*"), f"{path}.scope"
                    ),
                    comparator=comparator,
                    threshold=rctx.get("threshold", float),
                    channel=channel,
                    cooldown=timedelta(hours=rctx.get("cooldown-hours", float, 24.0)),
                )
            )
        except ValidationError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return channels, failure_channel, tuple(rules)


def _parse_roles(ctx: _Ctx) -> dict[str, Role]:
    roles: dict[str, Role] = {}
    for item, path in ctx.list("roles", default=[]):
        rctx = _Ctx(item, path)
        name = rctx.get("role-name", str)
        if name in roles:
            raise ConfigError(f"{path}.role-name: duplicate role {name!r}")
        metric_names = rctx.get("readable-metrics", list)
        metrics: set[str] = set()
        for i, metric_name in enumerate(metric_names):
            if metric_name == "*":
                metrics.add("*")
            else:
                metrics.add(_parse_metric(metric_name, f"{path}.readable-metrics[{i}]").value)
        selectors = tuple(
            _parse_selector(sel, sel_path)
            for sel, sel_path in rctx.list("readable-scopes", default=["*"])
        )
        roles[name] = Role(
            name=name,
            readable_metrics=frozenset(metrics),
            scope_selectors=selectors,
            raw_drilldown_allowed=rctx.get("raw-drilldown-allowed", bool, False),
        )
    return roles


def _parse_query_api(ctx: _Ctx) -> QueryApiConfig:
    roles = _parse_roles(ctx)
    principals: dict[str, Principal] = {}
    tokens: dict[str, str] = {}
    for item, path in ctx.list("tokens", default=[]):
        tctx = _Ctx(item, path)
        secret = tctx.get("token", str)
        principal_name = tctx.get("principal", str)
        role_names = tctx.get("roles", list)
        if not role_names:
            raise ConfigError(f"{path}.roles: a principal needs at least one role")
        for role_name in role_names:
            if role_name not in roles:
                raise ConfigError(f"{path}.roles: unknown role {role_name!r}")
        principals[principal_name] = Principal(
            name=principal_name, roles=tuple(roles[r] for r in role_names)
        )
        tokens[secret] = principal_name
    cache_ctx = ctx.child("cache", default={})
    per_metric: dict[MetricId, float] = {}
    per_metric_ctx = cache_ctx.child("per-metric-ttl-seconds", default={})
    for metric_name in per_metric_ctx.doc:
        metric = _parse_metric(metric_name, f"{per_metric_ctx.path}.{metric_name}")
        per_metric[metric] = per_metric_ctx.get(metric_name, float)
    ttl = cache_ctx.get("default-ttl-seconds", float, 300.0)
    if ttl < 0:
        raise ConfigError(f"{cache_ctx.path}.default-ttl-seconds: must be non-negative")
    return QueryApiConfig(
        host=ctx.get("host", str, "127.0.0.1"),
        port=ctx.get("port", int, 8640),
        cors_origins=tuple(ctx.get("cors-origins", list, ["*"])),
        default_ttl_seconds=ttl,
        per_metric_ttl_seconds=per_metric,
        access=AccessControl.build(tokens, principals),
    )


def _parse_ingest_api(ctx: _Ctx) -> IngestApiConfig:
    tokens = []
    seen = set()
    for item, path in ctx.list("tokens", default=[]):
        tctx = _Ctx(item, path)
        token_id = tctx.get("token-id", str)
        if token_id in seen:
            raise ConfigError(f"{path}.token-id: duplicate token {token_id!r}")
        seen.add(token_id)
        collections = tctx.get("allowed-collections", list)
        if not collections:
            raise ConfigError(f"{path}.allowed-collections: must not be empty")
        tokens.append(
            ApiToken.from_secret(
                token_id=token_id,
                secret=tctx.get("secret", str),
                allowed_collections=frozenset(collections),
                principal=tctx.get("principal", str, token_id),
            )
        )
    return IngestApiConfig(
        max_body_bytes=ctx.get("max-body-bytes", int, 1_048_576),
        tokens=tuple(tokens),
    )


def load_config(path: str | Path) -> PlatformConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc, base_dir=path.parent)


def parse_config(doc: dict, base_dir: Path) -> PlatformConfig:
    ctx = _Ctx(doc)
    platform_names = ctx.get("platforms", list)
    if not platform_names:
        raise ConfigError("platforms: must list at least one platform label")
    for i, name in enumerate(platform_names):
        if not isinstance(name, str) or not name or name != name.lower():
            raise ConfigError(f"platforms[{i}]: labels must be non-empty lowercase")
    platforms = frozenset(platform_names)

    scheduler_ctx = ctx.child("scheduler", default={})
    retry_ctx = scheduler_ctx.child("retry", default={})
    try:
        retry = RetryPolicy(
            max_attempts=retry_ctx.get("max-attempts", int, 5),
            base_delay=retry_ctx.get("base-delay-seconds", float, 1.0),
            multiplier=retry_ctx.get("multiplier", float, 2.0),
        )
    except ValidationError as exc:
        raise ConfigError(f"{retry_ctx.path}: {exc}") from None
    scheduler = SchedulerConfig(
        parallelism=scheduler_ctx.get("parallelism", int, 4),
        tick_interval_seconds=scheduler_ctx.get("tick-interval-seconds", float, 1.0),
        run_on_start=scheduler_ctx.get("run-on-start", bool, True),
        retry=retry,
        credential_warn=timedelta(days=scheduler_ctx.get("credential-warn-days", float, 7.0)),
    )

    processing_ctx = ctx.child("processing", default={})
    granularities = tuple(
        processing_ctx.get("granularities", list, ["daily", "weekly", "monthly"])
    )
    for granularity in granularities:
        if granularity not in ("daily", "weekly", "monthly"):
            raise ConfigError(f"{processing_ctx.path}.granularities: unknown {granularity!r}")
    try:
        engine = EngineConfig(
            platforms=platforms,
            main_branch_pattern=ctx.get("main-branch-pattern", str, "main"),
            rolling_window_months=processing_ctx.get("rolling-mau-months", int, 3),
            rolling_baseline_month=processing_ctx.get("rolling-mau-baseline", str, None),
        )
    except (ValidationError, Exception) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"processing: {exc}") from None

    channels, failure_channel, rules = _parse_alerting(ctx.child("alerting", default={}))

    return PlatformConfig(
        base_dir=base_dir,
        platforms=platforms,
        store_path=base_dir / ctx.get("store-path", str, "data/store.db"),
        scheduler_state_path=base_dir
        / ctx.get("scheduler-state-path", str, "data/scheduler-state.json"),
        alert_state_path=base_dir / ctx.get("alert-state-path", str, "data/alert-state.json"),
        fixture_root=base_dir / ctx.get("fixture-root", str, "fixtures"),
        engine=engine,
        granularities=granularities,
        scheduler=scheduler,
        sources=_parse_sources(ctx, platforms),
        channels=channels,
        failure_channel=failure_channel,
        rules=rules,
        ingest_api=_parse_ingest_api(ctx.child("ingest-api", default={})),
        query_api=_parse_query_api(ctx.child("query-api", default={})),
        boards=ctx.get("boards", list, []),
        dashboard_dist=(
            base_dir / ctx.get("dashboard-dist", str)
            if ctx.get("dashboard-dist", str, None)
            else None
        ),
    )
