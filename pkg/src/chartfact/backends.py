"""Concrete backends for entailment, chart-to-table, and rectification.

Every role supports three wirings, picked by a selector string:

* a deterministic local stand-in (``oracle`` / ``gold`` / ``truthful``)
  that needs no model and answers from the gold table,
* ``fixture:<path>`` replaying recorded responses from a directory keyed
  by request content hash,
* ``remote:<base-url>`` speaking the wire protocol to a live service.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import wire
from .entailment import (
    EntailmentLogits,
    oracle_logits,
    sentence_from_prompt,
)
from .table import (
    ChartRef,
    Table,
    parse_linearized,
    serialize_linearized,
    single_numeric_column,
)
from .text import TrendLexicon, find_trend_terms
from .correction import MARKER, NO_ERRORS_LINE
from .entailment import _NUMBER_TOKEN_RE, _sentence_numbers, _table_numbers, _matches_any
from .wire import BackendError, BackendUnavailableError


def _require_table(chart: ChartRef | Table) -> Table:
    if isinstance(chart, Table):
        return chart
    if chart.gold_table is None:
        raise BackendUnavailableError(f"chart {chart.id!r} has no gold table")
    return chart.gold_table


@dataclass
class OracleEntailmentBackend:
    """Table-grounded heuristic logits; needs charts with gold tables."""

    lexicon: TrendLexicon | None = None
    backend_id: str = "oracle"
    concurrency_safe: bool = True

    def __post_init__(self):
        if self.lexicon is None:
            self.lexicon = TrendLexicon.default()

    def score(self, subject: ChartRef | Table, prompt: str) -> EntailmentLogits:
        table = _require_table(subject)
        sentence = sentence_from_prompt(prompt)
        return oracle_logits(table, sentence, self.lexicon)


@dataclass
class FixtureEntailmentBackend:
    """Replays recorded entailment responses from a fixture directory."""

    directory: str
    backend_id: str = ""
    concurrency_safe: bool = True

    def __post_init__(self):
        if not self.backend_id:
            self.backend_id = f"fixture:{self.directory}"

    def score(self, subject: ChartRef | Table, prompt: str) -> EntailmentLogits:
        envelope = wire.entail_envelope(subject, prompt)
        payload = wire.read_fixture(self.directory, wire.ROUTE_ENTAIL, envelope)
        try:
            return EntailmentLogits(
                float(payload["logit_yes"]), float(payload["logit_no"])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendUnavailableError(f"malformed fixture payload: {exc}") from exc


@dataclass
class RemoteEntailmentBackend:
    """Queries a live wire-protocol service for entailment logits."""

    base_url: str
    backend_id: str = ""
    concurrency_safe: bool = True

    def __post_init__(self):
        if not self.backend_id:
            self.backend_id = f"remote:{self.base_url}"
        self._transport = wire.RemoteTransport(self.base_url)

    def score(self, subject: ChartRef | Table, prompt: str) -> EntailmentLogits:
        envelope = wire.entail_envelope(subject, prompt)
        body = self._transport.post(wire.ROUTE_ENTAIL, envelope)
        try:
            return EntailmentLogits(float(body["logit_yes"]), float(body["logit_no"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendUnavailableError(f"malformed entail response: {exc}") from exc


@dataclass
class GoldTableBackend:
    """Chart-to-table stage that returns the chart's own gold table."""

    backend_id: str = "gold"
    concurrency_safe: bool = True

    def convert(self, chart: ChartRef) -> tuple[str, Table]:
        table = _require_table(chart)
        return table.title or "", table


@dataclass
class FixtureChart2TableBackend:
    directory: str
    backend_id: str = ""
    concurrency_safe: bool = True

    def __post_init__(self):
        if not self.backend_id:
            self.backend_id = f"fixture:{self.directory}"

    def convert(self, chart: ChartRef) -> tuple[str, Table]:
        envelope = wire.chart2table_envelope(chart)
        payload = wire.read_fixture(self.directory, wire.ROUTE_CHART2TABLE, envelope)
        try:
            title = str(payload["title"])
            table = parse_linearized(payload["table_linearized"], title=title or None)
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendUnavailableError(f"malformed fixture payload: {exc}") from exc
        return title, table


@dataclass
class RemoteChart2TableBackend:
    base_url: str
    backend_id: str = ""
    concurrency_safe: bool = True

    def __post_init__(self):
        if not self.backend_id:
            self.backend_id = f"remote:{self.base_url}"
        self._transport = wire.RemoteTransport(self.base_url)

    def convert(self, chart: ChartRef) -> tuple[str, Table]:
        envelope = wire.chart2table_envelope(chart)
        body = self._transport.post(wire.ROUTE_CHART2TABLE, envelope)
        try:
            title = str(body["title"])
            table = parse_linearized(body["table_linearized"], title=title or None)
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendUnavailableError(
                f"malformed chart2table response: {exc}"
            ) from exc
        return title, table


@dataclass
class TruthfulRectifier:
    """Scripted rectifier that substitutes values straight from the table.

    A deterministic stand-in for a model rectifier: numbers the table
    cannot support are replaced by the value from the unique table row
    anchored by a label mentioned in the caption, and trend terms that
    contradict the single numeric column's direction are inverted.  When
    nothing is wrong it declares NO ERRORS and repeats the caption.
    """

    lexicon: TrendLexicon | None = None
    backend_id: str = "truthful"
    concurrency_safe: bool = True

    def __post_init__(self):
        if self.lexicon is None:
            self.lexicon = TrendLexicon.default()

    def rectify(self, title: str, table: Table, caption: str) -> str:
        fixes: list[tuple[int, int, str, str]] = []
        col = single_numeric_column(table)
        pool = _table_numbers(table)
        if col is not None:
            anchored_rows = []
            for r, row in enumerate(table.rows):
                for j, cell in enumerate(row):
                    if j == col or not cell.raw.strip():
                        continue
                    if cell.raw in caption:
                        anchored_rows.append(r)
                        break
            for m in _NUMBER_TOKEN_RE.finditer(caption):
                token = m.group(0)
                values = _sentence_numbers(token)
                if not values or _matches_any(values[0], pool):
                    continue
                if len(anchored_rows) != 1:
                    continue
                target = table.rows[anchored_rows[0]][col].raw
                end = m.end()
                if token.endswith("%") and not target.endswith("%"):
                    end -= 1
                fixes.append(
                    (
                        m.start(),
                        end,
                        target,
                        f"- the value {caption[m.start():end]} is not in the table; "
                        f"the {table.header[col]} entry for that row is {target}",
                    )
                )
            if table.row_count >= 2:
                cells = table.column(col)
                diff = (
                    cells[-1].numeric.effective_value
                    - cells[0].numeric.effective_value
                )
                for match in find_trend_terms(caption, self.lexicon):
                    claimed_up = self.lexicon.is_upward(match.source.polarity)
                    if (claimed_up and diff < 0) or (not claimed_up and diff > 0):
                        replacement = self.lexicon.antonym_surface(match.matched_text)
                        fixes.append(
                            (
                                match.start,
                                match.end,
                                replacement,
                                f"- the trend term {match.matched_text!r} contradicts "
                                f"the table; the series actually moves the other way",
                            )
                        )
        if not fixes:
            return f"{NO_ERRORS_LINE}\n{MARKER}\n{caption}"
        fixes.sort(key=lambda f: f[0])
        corrected = caption
        for start, end, replacement, _ in reversed(fixes):
            corrected = corrected[:start] + replacement + corrected[end:]
        notes = "\n".join(note for _, _, _, note in fixes)
        return f"{notes}\n{MARKER}\n{corrected}"


@dataclass
class FixtureRectifier:
    directory: str
    template_id: str = "default"
    backend_id: str = ""
    concurrency_safe: bool = True

    def __post_init__(self):
        if not self.backend_id:
            self.backend_id = f"fixture:{self.directory}"

    def rectify(self, title: str, table: Table, caption: str) -> str:
        envelope = wire.rectify_envelope(
            title, serialize_linearized(table), caption, self.template_id
        )
        payload = wire.read_fixture(self.directory, wire.ROUTE_RECTIFY, envelope)
        try:
            return str(payload["raw_response"])
        except KeyError as exc:
            raise BackendUnavailableError(f"malformed fixture payload: {exc}") from exc


@dataclass
class RemoteRectifier:
    base_url: str
    template_id: str = "default"
    backend_id: str = ""
    concurrency_safe: bool = True

    def __post_init__(self):
        if not self.backend_id:
            self.backend_id = f"remote:{self.base_url}"
        self._transport = wire.RemoteTransport(self.base_url)

    def rectify(self, title: str, table: Table, caption: str) -> str:
        envelope = wire.rectify_envelope(
            title, serialize_linearized(table), caption, self.template_id
        )
        body = self._transport.post(wire.ROUTE_RECTIFY, envelope)
        try:
            return str(body["raw_response"])
        except KeyError as exc:
            raise BackendUnavailableError(f"malformed rectify response: {exc}") from exc


def _split_selector(selector: str) -> tuple[str, str]:
    kind, _, arg = selector.partition(":")
    return kind, arg


def make_entail_backend(selector: str, lexicon: TrendLexicon | None = None):
    """Build an entailment backend from its selector string."""
    kind, arg = _split_selector(selector)
    if kind == "oracle" and not arg:
        return OracleEntailmentBackend(lexicon=lexicon)
    if kind == "fixture" and arg:
        return FixtureEntailmentBackend(arg)
    if kind == "remote" and arg:
        return RemoteEntailmentBackend(arg)
    raise ValueError(f"unknown entailment backend selector {selector!r}")


def make_chart2table_backend(selector: str):
    kind, arg = _split_selector(selector)
    if kind == "gold" and not arg:
        return GoldTableBackend()
    if kind == "fixture" and arg:
        return FixtureChart2TableBackend(arg)
    if kind == "remote" and arg:
        return RemoteChart2TableBackend(arg)
    raise ValueError(f"unknown chart2table backend selector {selector!r}")


def make_rectifier_backend(
    selector: str, lexicon: TrendLexicon | None = None, template_id: str = "default"
):
    kind, arg = _split_selector(selector)
    if kind == "truthful" and not arg:
        return TruthfulRectifier(lexicon=lexicon)
    if kind == "fixture" and arg:
        return FixtureRectifier(arg, template_id=template_id)
    if kind == "remote" and arg:
        return RemoteRectifier(arg, template_id=template_id)
    raise ValueError(f"unknown rectifier backend selector {selector!r}")
