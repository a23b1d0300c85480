"""Turn a request log into a fixture directory.

The log is what a running service accumulates in
``app.state.request_log``: one ``{"route", "envelope", "payload"}``
entry per successful exchange.  A JSONL file of such entries works too.
The resulting directory is directly usable by any client implementing
the content-hash fixture scheme.
"""

from __future__ import annotations

import json
import os
from typing import Iterable, Union

from . import protocol

LogEntry = dict
RequestLog = Union[str, os.PathLike, Iterable[LogEntry]]


def record_fixtures(request_log: RequestLog, directory: str) -> str:
    if isinstance(request_log, (str, os.PathLike)):
        entries = _read_log_file(request_log)
    else:
        entries = list(request_log)
    for i, entry in enumerate(entries):
        try:
            route = entry["route"]
            envelope = entry["envelope"]
            payload = entry["payload"]
        except (TypeError, KeyError) as exc:
            raise ValueError(f"log entry {i} lacks route/envelope/payload") from exc
        # Fixture bodies never carry the transport version field.
        cleaned = {k: v for k, v in payload.items() if k != "version"}
        protocol.write_fixture(directory, route, envelope, cleaned)
    return directory


def _read_log_file(path) -> list[LogEntry]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                entries.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"log line {lineno}: {exc}") from exc
    return entries
