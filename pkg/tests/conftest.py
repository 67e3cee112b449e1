import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import pytest


def base_config_doc(**overrides):
    """A complete, valid platform config document for tests."""
    doc = {
        "platforms": ["android", "web"],
        "store-path": "data/store.db",
        "scheduler-state-path": "data/scheduler-state.json",
        "alert-state-path": "data/alert-state.json",
        "fixture-root": "fixtures",
        "scheduler": {
            "parallelism": 2,
            "tick-interval-seconds": 0.05,
            "run-on-start": True,
            "retry": {"max-attempts": 5, "base-delay-seconds": 0.01, "multiplier": 2.0},
        },
        "sources": [
            {"source-id": source, "connector": "fixture", "schedule": schedule}
            for source, schedule in (
                ("git", "0 1 * * *"),
                ("splunk", "0 * * * *"),
                ("deploy", "15 1 * * *"),
                ("jira", "30 1 * * *"),
                ("crash", "45 1 * * *"),
                ("jenkins", "0 2 * * *"),
                ("tableau", "15 2 * * *"),
                ("copilot", "30 2 * * *"),
            )
        ],
        "alerting": {
            "channels": {
                "quality": {"kind": "file", "path": "alerts.log"},
                "ops": {"kind": "stdout"},
            },
            "failure-channel": "ops",
            "rules": [
                {
                    "rule-id": "crash-above-5",
                    "metric-id": "user-crash-rate",
                    "scope": {"platform": "*", "team": "*"},
                    "comparator": "gt",
                    "threshold": 5.0,
                    "channel": "quality",
                    "cooldown-hours": 24,
                }
            ],
        },
        "ingest-api": {
            "max-body-bytes": 65536,
            "tokens": [
                {
                    "token-id": "partner",
                    "secret": "partner-secret",
                    "principal": "partner-team",
                    "allowed-collections": ["partner-events", "git"],
                }
            ],
        },
        "query-api": {
            "host": "127.0.0.1",
            "port": 8640,
            "cache": {"default-ttl-seconds": 300.0},
            "roles": [
                {
                    "role-name": "admin",
                    "readable-metrics": ["*"],
                    "readable-scopes": ["*"],
                    "raw-drilldown-allowed": True,
                },
                {
                    "role-name": "viewer",
                    "readable-metrics": ["pr-cycle-time", "main-fail-rate"],
                    "readable-scopes": [{"platform": "web", "team": "*"}],
                    "raw-drilldown-allowed": False,
                },
            ],
            "tokens": [
                {"token": "admin-token", "principal": "lead", "roles": ["admin"]},
                {"token": "viewer-token", "principal": "observer", "roles": ["viewer"]},
            ],
        },
        "boards": [
            {
                "board": "quality",
                "panels": [
                    {
                        "metric-id": "user-crash-rate",
                        "scope": "platform:android",
                        "visualization": "trend",
                    }
                ],
            }
        ],
    }
    doc.update(overrides)
    return doc


def write_config(tmp_path: Path, **overrides) -> Path:
    path = tmp_path / "devlens.json"
    path.write_text(json.dumps(base_config_doc(**overrides), indent=2), encoding="utf-8")
    return path


class StubHttpServer:
    """Local HTTP stub: serves scripted responses and records requests."""

    def __init__(self):
        self.responses = []  # list of (status, headers, body-bytes)
        self.requests = []  # list of dicts with method/path/headers/body
        self.lock = threading.Lock()
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def _handle(self):
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length) if length else b""
                with stub.lock:
                    stub.requests.append(
                        {
                            "method": self.command,
                            "path": self.path,
                            "headers": dict(self.headers),
                            "body": body,
                        }
                    )
                    if stub.responses:
                        status, headers, payload = stub.responses.pop(0)
                    else:
                        status, headers, payload = 200, {}, b""
                self.send_response(status)
                for name, value in headers.items():
                    self.send_header(name, value)
                self.end_headers()
                if payload:
                    self.wfile.write(payload)

            do_GET = _handle
            do_POST = _handle

            def log_message(self, *args):
                pass

        self.server = HTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def url(self):
        host, port = self.server.server_address
        return f"http://{host}:{port}"

    def enqueue(self, status=200, headers=None, body=b""):
        if isinstance(body, str):
            body = body.encode("utf-8")
        elif isinstance(body, (dict, list)):
            body = json.dumps(body).encode("utf-8")
        with self.lock:
            self.responses.append((status, headers or {}, body))

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def stub_server():
    server = StubHttpServer()
    yield server
    server.close()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if report.nodeid.startswith("tests/test_acceptance.py::") and getattr(
                report, "when", "call"
            ) in ("call", "setup"):
                if outcome == "passed" and report.when != "call":
                    continue
                name = report.nodeid.split("::")[-1]
                rows.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if rows:
        terminalreporter.section("acceptance criteria")
        for name, verdict in rows:
            terminalreporter.write_line(f"{verdict}  {name}")
