"""Backend wire protocol: request envelopes, content hashes, fixtures.

Three request routes exist, mirrored by any conforming inference service:

* ``POST /v1/entail``      {image_uri | table_linearized, prompt}
                           -> {logit_yes, logit_no, version}
* ``POST /v1/chart2table`` {image_uri}
                           -> {title, table_linearized, version}
* ``POST /v1/rectify``     {title, table_linearized, caption, template_id}
                           -> {raw_response, version}
* ``GET  /v1/health``      -> {status, version, mode}

Recorded-fixture directories hold one ``<hash>.json`` file per request,
where ``<hash>`` is the SHA-256 hex digest of the route name, a newline,
and the canonical JSON of the request envelope (sorted keys, no spaces,
UTF-8, None-valued fields omitted).  The file body is the response
payload without the ``version`` transport field.  Both this package and
fixture-recording services implement exactly this scheme so fixtures are
interchangeable.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from typing import Any

import requests

from .table import ChartRef, Table, serialize_linearized

PROTOCOL_VERSION = "1"

ROUTE_ENTAIL = "/v1/entail"
ROUTE_CHART2TABLE = "/v1/chart2table"
ROUTE_RECTIFY = "/v1/rectify"
ROUTE_HEALTH = "/v1/health"


class BackendError(RuntimeError):
    """Base class for backend failures."""


class BackendUnavailableError(BackendError):
    """Transport or response-parse failure while talking to a backend."""


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def request_hash(route: str, envelope: dict) -> str:
    """Content hash identifying one request; the fixture file stem."""
    cleaned = {k: v for k, v in envelope.items() if v is not None}
    payload = f"{route}\n{canonical_json(cleaned)}"
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def entail_envelope(subject: ChartRef | Table, prompt: str) -> dict:
    """Build the /v1/entail request body for a chart or bare table.

    A chart with an image uri is scored from the image; otherwise its
    gold table (or the bare table) is linearized into the request.
    """
    if isinstance(subject, Table):
        return {"table_linearized": serialize_linearized(subject), "prompt": prompt}
    if subject.image_uri is not None:
        return {"image_uri": subject.image_uri, "prompt": prompt}
    if subject.gold_table is not None:
        return {
            "table_linearized": serialize_linearized(subject.gold_table),
            "prompt": prompt,
        }
    raise BackendError(f"chart {subject.id!r} has neither image uri nor gold table")


def chart2table_envelope(chart: ChartRef) -> dict:
    if chart.image_uri is None:
        raise BackendError(f"chart {chart.id!r} has no image uri")
    return {"image_uri": chart.image_uri}


def rectify_envelope(
    title: str, table_linearized: str, caption: str, template_id: str = "default"
) -> dict:
    return {
        "title": title,
        "table_linearized": table_linearized,
        "caption": caption,
        "template_id": template_id,
    }


def fixture_path(directory: str, route: str, envelope: dict) -> str:
    return os.path.join(directory, request_hash(route, envelope) + ".json")


def read_fixture(directory: str, route: str, envelope: dict) -> dict:
    path = fixture_path(directory, route, envelope)
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except FileNotFoundError:
        raise BackendUnavailableError(
            f"no recorded fixture for this request under {directory}"
        ) from None
    except (OSError, json.JSONDecodeError) as exc:
        raise BackendUnavailableError(f"unreadable fixture {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise BackendUnavailableError(f"fixture {path} is not a JSON object")
    return payload


def write_fixture(directory: str, route: str, envelope: dict, payload: dict) -> str:
    os.makedirs(directory, exist_ok=True)
    path = fixture_path(directory, route, envelope)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
    return path


class RemoteTransport:
    """HTTP client for the wire protocol with bounded retries.

    Transient failures (connection errors, 5xx) are retried up to three
    attempts with exponential backoff; 4xx responses are schema errors on
    our side and surface immediately.
    """

    attempts = 3

    def __init__(self, base_url: str, timeout: float = 30.0, backoff: float = 0.5):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.backoff = backoff

    def post(self, route: str, payload: dict) -> dict:
        url = self.base_url + route
        last_error: Exception | None = None
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                resp = requests.post(url, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if 400 <= resp.status_code < 500:
                raise BackendError(
                    f"{route} rejected the request ({resp.status_code}): {resp.text}"
                )
            if resp.status_code >= 500:
                last_error = BackendUnavailableError(
                    f"{route} failed with {resp.status_code}"
                )
                continue
            try:
                body = resp.json()
            except ValueError as exc:
                raise BackendUnavailableError(
                    f"{route} returned non-JSON body"
                ) from exc
            if not isinstance(body, dict):
                raise BackendUnavailableError(f"{route} returned a non-object body")
            return body
        raise BackendUnavailableError(
            f"{url} unreachable after {self.attempts} attempts: {last_error}"
        )
