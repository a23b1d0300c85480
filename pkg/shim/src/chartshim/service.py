"""The service itself: three POST routes and a health check.

Stub mode answers every request from a fixture directory keyed by
request content hash; an unknown request is a 404, never a guess.
Model mode delegates to an adapter; adapter failures are 5xx, schema
problems on either side are never papered over.

Every successful exchange is appended to ``app.state.request_log`` as
``{"route", "envelope", "payload"}`` so a session can be turned into a
fixture directory with ``record_fixtures``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import ValidationError

from . import __version__, adapters, protocol, schemas
from .protocol import SERVICE_VERSION


@dataclass
class ShimConfig:
    mode: str = "stub"
    fixture_dir: str | None = None
    adapter: Any = None

    def __post_init__(self):
        if self.mode not in ("stub", "model"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "stub" and not self.fixture_dir:
            raise ValueError("stub mode needs a fixture directory")
        if self.mode == "model" and self.adapter is None:
            raise ValueError("model mode needs an adapter")


def _stub_lookup(config: ShimConfig, route: str, envelope: dict) -> dict:
    try:
        return protocol.read_fixture(config.fixture_dir, route, envelope)
    except protocol.FixtureMissingError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    except protocol.FixtureCorruptError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc


def _call_adapter(adapter: Any, method: str, envelope: dict) -> Any:
    handler = getattr(adapter, method, None)
    if not callable(handler):
        raise HTTPException(
            status_code=501, detail=f"adapter does not implement {method}"
        )
    try:
        return handler(envelope)
    except HTTPException:
        raise
    except Exception as exc:
        raise HTTPException(status_code=500, detail=f"model failure: {exc}") from exc


def _checked(payload: Any, model: type, route: str) -> dict:
    """Validate an outgoing payload; a bad one is a 5xx, never a fallback."""
    if not isinstance(payload, dict):
        raise HTTPException(
            status_code=500, detail=f"{route} produced a non-object payload"
        )
    try:
        model.model_validate({**payload, "version": SERVICE_VERSION})
    except ValidationError as exc:
        raise HTTPException(
            status_code=500, detail=f"{route} produced an invalid payload: {exc}"
        ) from exc
    return payload


def create_app(config: ShimConfig) -> FastAPI:
    if config.mode == "model" and isinstance(config.adapter, str):
        config.adapter = adapters.load_adapter(config.adapter)

    app = FastAPI(title="chartfact-shim", version=__version__)
    app.state.config = config
    app.state.request_log = []

    def respond(route: str, envelope: dict, payload: dict, model: type) -> dict:
        payload = _checked(payload, model, route)
        app.state.request_log.append(
            {"route": route, "envelope": envelope, "payload": payload}
        )
        return {**payload, "version": SERVICE_VERSION}

    @app.post(protocol.ROUTE_ENTAIL, response_model=schemas.EntailResponse)
    def entail(body: schemas.EntailRequest):
        envelope = body.envelope()
        if config.mode == "stub":
            payload = _stub_lookup(config, protocol.ROUTE_ENTAIL, envelope)
        else:
            result = _call_adapter(config.adapter, "entail", envelope)
            if isinstance(result, str):
                try:
                    result = adapters.logits_from_yes_no(result)
                except adapters.AdapterError as exc:
                    raise HTTPException(status_code=500, detail=str(exc)) from exc
            payload = result
        return respond(protocol.ROUTE_ENTAIL, envelope, payload, schemas.EntailResponse)

    @app.post(protocol.ROUTE_CHART2TABLE, response_model=schemas.Chart2TableResponse)
    def chart2table(body: schemas.Chart2TableRequest):
        envelope = body.envelope()
        if config.mode == "stub":
            payload = _stub_lookup(config, protocol.ROUTE_CHART2TABLE, envelope)
        else:
            payload = _call_adapter(config.adapter, "chart2table", envelope)
        payload = _checked(
            payload, schemas.Chart2TableResponse, protocol.ROUTE_CHART2TABLE
        )
        try:
            protocol.validate_linearized(payload["table_linearized"])
        except ValueError as exc:
            raise HTTPException(
                status_code=500, detail=f"invalid table from backend: {exc}"
            ) from exc
        return respond(
            protocol.ROUTE_CHART2TABLE,
            envelope,
            payload,
            schemas.Chart2TableResponse,
        )

    @app.post(protocol.ROUTE_RECTIFY, response_model=schemas.RectifyResponse)
    def rectify(body: schemas.RectifyRequest):
        envelope = body.envelope()
        if config.mode == "stub":
            payload = _stub_lookup(config, protocol.ROUTE_RECTIFY, envelope)
        else:
            result = _call_adapter(config.adapter, "rectify", envelope)
            if isinstance(result, str):
                result = {"raw_response": result}
            payload = result
        return respond(
            protocol.ROUTE_RECTIFY, envelope, payload, schemas.RectifyResponse
        )

    @app.get(protocol.ROUTE_HEALTH, response_model=schemas.HealthResponse)
    def health():
        return {"status": "ok", "version": SERVICE_VERSION, "mode": config.mode}

    return app
