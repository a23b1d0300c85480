"""The wire contract, implemented independently of any client library.

Fixture files are content-addressed: the stem is the SHA-256 hex digest
of the route name, a newline, and the canonical JSON of the request
envelope (sorted keys, compact separators, UTF-8, None-valued fields
omitted).  The file body is the response payload without the transport
``version`` field.  Any client or service implementing the same scheme
can exchange fixture directories with this one.
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Any

SERVICE_VERSION = "1"

ROUTE_ENTAIL = "/v1/entail"
ROUTE_CHART2TABLE = "/v1/chart2table"
ROUTE_RECTIFY = "/v1/rectify"
ROUTE_HEALTH = "/v1/health"


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def request_hash(route: str, envelope: dict) -> str:
    cleaned = {k: v for k, v in envelope.items() if v is not None}
    payload = f"{route}\n{canonical_json(cleaned)}"
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def fixture_path(directory: str, route: str, envelope: dict) -> str:
    return os.path.join(directory, request_hash(route, envelope) + ".json")


class FixtureMissingError(LookupError):
    """No recorded response for this request."""


class FixtureCorruptError(ValueError):
    """A recorded response exists but cannot be used."""


def read_fixture(directory: str, route: str, envelope: dict) -> dict:
    path = fixture_path(directory, route, envelope)
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except FileNotFoundError:
        raise FixtureMissingError(
            f"no recorded fixture for this request under {directory}"
        ) from None
    except (OSError, json.JSONDecodeError) as exc:
        raise FixtureCorruptError(f"unreadable fixture {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise FixtureCorruptError(f"fixture {path} is not a JSON object")
    return payload


def write_fixture(directory: str, route: str, envelope: dict, payload: dict) -> str:
    os.makedirs(directory, exist_ok=True)
    path = fixture_path(directory, route, envelope)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
    return path


def validate_linearized(text: str) -> None:
    """Cheap structural check for linearized tables.

    Rows are separated by ``&&&``, cells by TAB, header row first, and
    every row must have the header's column count.  Raises ValueError.
    """
    if not isinstance(text, str) or not text:
        raise ValueError("table_linearized must be a non-empty string")
    rows = text.split("&&&")
    width = len(rows[0].split("\t"))
    if width < 1 or not any(cell.strip() for cell in rows[0].split("\t")):
        raise ValueError("header row is empty")
    for i, row in enumerate(rows[1:], start=1):
        if len(row.split("\t")) != width:
            raise ValueError(f"row {i} has a different column count than the header")
