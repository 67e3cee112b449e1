"""Token-authenticated ingestion endpoint for structured event dumps.

Other teams push canonical events (one JSON object per line) into named
raw collections without running their own pipelines. Every line is
validated against the event schema before it can touch the store, so no
malformed record is ever observable downstream.
"""

from __future__ import annotations

from typing import Sequence

from fastapi import APIRouter, Request
from fastapi.responses import JSONResponse

from .clock import Clock
from .domain import SCHEMA_VERSION, ValidationError, natural_key, parse_event_line
from .rbac import ApiToken
from .storage import RawRecord, Store


def bearer_secret(request: Request) -> str | None:
    header = request.headers.get("Authorization", "")
    scheme, _, secret = header.partition(" ")
    if scheme.lower() != "bearer" or not secret:
        return None
    return secret


def build_ingest_router(
    store: Store,
    tokens: Sequence[ApiToken],
    platforms: frozenset[str],
    *,
    max_body_bytes: int = 1_048_576,
    clock: Clock | None = None,
) -> APIRouter:
    router = APIRouter()
    clock = clock or Clock()

    def _authenticate(request: Request) -> ApiToken | None:
        secret = bearer_secret(request)
        if secret is None:
            return None
        for token in tokens:
            if token.verify(secret):
                return token
        return None

    @router.post("/ingest/{source_id}")
    async def ingest(source_id: str, request: Request) -> JSONResponse:
        body = await request.body()
        if len(body) > max_body_bytes:
            return JSONResponse(
                {"detail": f"body exceeds {max_body_bytes} bytes"}, status_code=413
            )
        token = _authenticate(request)
        if token is None:
            return JSONResponse({"detail": "missing or invalid token"}, status_code=401)
        if source_id not in token.allowed_collections:
            return JSONResponse(
                {"detail": f"token not allowed to write collection {source_id!r}"},
                status_code=403,
            )
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            return JSONResponse({"detail": "body is not valid UTF-8"}, status_code=400)

        accepted = 0
        errors: list[dict] = []
        fetched_at = clock.now()
        numbered = [
            (number, line) for number, line in enumerate(text.splitlines(), start=1)
            if line.strip()
        ]
        if not numbered:
            return JSONResponse({"detail": "empty batch"}, status_code=400)
        for number, line in numbered:
            try:
                event = parse_event_line(line, platforms)
                store.append_raw(
                    RawRecord(
                        source_id=source_id,
                        natural_key=natural_key(event),
                        fetched_at=fetched_at,
                        payload=line,
                    )
                )
            except ValidationError as exc:
                errors.append({"line": number, "reason": str(exc)})
                continue
            accepted += 1
        report = {"accepted": accepted, "rejected": len(errors), "errors": errors}
        return JSONResponse(report, status_code=200 if accepted else 422)

    @router.get("/ingest/health")
    def health() -> JSONResponse:
        if store.ping():
            return JSONResponse({"status": "ok", "schema-version": SCHEMA_VERSION})
        return JSONResponse(
            {"status": "unavailable", "schema-version": SCHEMA_VERSION}, status_code=503
        )

    return router
