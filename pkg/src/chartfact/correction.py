"""Two-stage caption correction: recover the table, then rectify.

Stage one turns the chart into (title, table) through a chart-to-table
port.  Stage two hands title, linearized table, and caption to a
rectifier, which must answer with an explanation followed by the marker
line ``CORRECTED CAPTION:`` and the corrected text.  The pipeline never
lets a malformed response or an oversized rewrite silently replace the
caption: those fall back to the original.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Protocol, Sequence, runtime_checkable

from .metrics import levenshtein
from .table import ChartRef, Table, serialize_linearized
from .text import Caption
from .wire import BackendError

MARKER = "CORRECTED CAPTION:"
NO_ERRORS_LINE = "NO ERRORS"

_PLACEHOLDERS = ("{TITLE}", "{TABLE}", "{CAPTION}")


class MissingMarkerError(ValueError):
    """The rectifier's response has no marker line to parse."""


class TemplateError(ValueError):
    pass


class CorrectionStatus(str, Enum):
    CORRECTED = "corrected"
    UNCHANGED = "unchanged"
    PARSE_FALLBACK = "parse_fallback"


@runtime_checkable
class Chart2TablePort(Protocol):
    backend_id: str
    concurrency_safe: bool

    def convert(self, chart: ChartRef) -> tuple[str, Table]:
        ...


@runtime_checkable
class RectifierPort(Protocol):
    backend_id: str
    concurrency_safe: bool

    def rectify(self, title: str, table: Table, caption: str) -> str:
        ...


@dataclass(frozen=True)
class CorrectionResult:
    original: Caption
    corrected: str
    explanation: str
    edit_distance: int
    table_used: Table
    status: CorrectionStatus

    def __post_init__(self):
        if self.status in (CorrectionStatus.UNCHANGED, CorrectionStatus.PARSE_FALLBACK):
            if self.corrected != self.original.raw or self.edit_distance != 0:
                raise ValueError(f"{self.status.value} result must keep the original")
        if self.edit_distance != levenshtein(self.original.raw, self.corrected):
            raise ValueError("edit_distance does not match the texts")


def default_template() -> str:
    return (
        resources.files("chartfact.data").joinpath("rectify_template.txt").read_text("utf-8")
    )


def render_rectification_prompt(
    title: str, table: Table, caption: str, template: str | None = None
) -> str:
    """Fill the rectification prompt template.

    The template must contain the {TITLE}, {TABLE} and {CAPTION}
    placeholders; the table is passed in its linearized form.
    """
    if template is None:
        template = default_template()
    for placeholder in _PLACEHOLDERS:
        if placeholder not in template:
            raise TemplateError(f"template is missing {placeholder}")
    return (
        template.replace("{TITLE}", title)
        .replace("{TABLE}", serialize_linearized(table))
        .replace("{CAPTION}", caption)
    )


def parse_rectifier_response(raw: str) -> tuple[str, str, bool]:
    """Split a rectifier response into (explanation, corrected, no_errors).

    The corrected caption is everything after the last marker occurrence,
    trimmed.  ``no_errors`` is set when the explanation carries a line
    that is exactly "NO ERRORS".
    """
    idx = raw.rfind(MARKER)
    if idx == -1:
        raise MissingMarkerError(f"response has no {MARKER!r} line")
    explanation = raw[:idx].strip()
    corrected = raw[idx + len(MARKER) :].strip()
    declared_no_errors = any(
        line.strip() == NO_ERRORS_LINE for line in explanation.splitlines()
    )
    return explanation, corrected, declared_no_errors


def correct_caption(
    chart: ChartRef,
    caption: Caption | str,
    c2t_backend: Chart2TablePort,
    rectifier_backend: RectifierPort,
    *,
    max_edit_ratio: float | None = None,
) -> CorrectionResult:
    """Run the full two-stage correction for one caption.

    Stage two sees only the title, the linearized table, and the caption
    text; nothing else about the chart leaks through.  A response with
    no marker becomes a PARSE_FALLBACK result carrying the original
    caption, and with ``max_edit_ratio`` set, corrections whose edit
    distance exceeds that share of the caption length are downgraded to
    UNCHANGED.
    """
    if isinstance(caption, str):
        caption = Caption.from_text(caption)
    title, table = c2t_backend.convert(chart)
    raw_response = rectifier_backend.rectify(title, table, caption.raw)
    try:
        explanation, corrected, declared_no_errors = parse_rectifier_response(
            raw_response
        )
    except MissingMarkerError:
        return CorrectionResult(
            original=caption,
            corrected=caption.raw,
            explanation=raw_response,
            edit_distance=0,
            table_used=table,
            status=CorrectionStatus.PARSE_FALLBACK,
        )
    if declared_no_errors or corrected == caption.raw:
        return CorrectionResult(
            original=caption,
            corrected=caption.raw,
            explanation=explanation,
            edit_distance=0,
            table_used=table,
            status=CorrectionStatus.UNCHANGED,
        )
    distance = levenshtein(caption.raw, corrected)
    if (
        max_edit_ratio is not None
        and len(caption.raw) > 0
        and distance > max_edit_ratio * len(caption.raw)
    ):
        return CorrectionResult(
            original=caption,
            corrected=caption.raw,
            explanation=explanation,
            edit_distance=0,
            table_used=table,
            status=CorrectionStatus.UNCHANGED,
        )
    return CorrectionResult(
        original=caption,
        corrected=corrected,
        explanation=explanation,
        edit_distance=distance,
        table_used=table,
        status=CorrectionStatus.CORRECTED,
    )


@dataclass(frozen=True)
class BatchOutcome:
    """Result slot for one batch item: a result or a recorded failure."""

    index: int
    result: CorrectionResult | None
    error: str | None = None


def batch_correct(
    items: Sequence[tuple[ChartRef, Caption | str]],
    c2t_backend: Chart2TablePort,
    rectifier_backend: RectifierPort,
    *,
    concurrency_limit: int = 4,
    max_edit_ratio: float | None = None,
) -> list[BatchOutcome]:
    """Correct many captions, never letting one failure abort the rest.

    Items run concurrently up to the limit unless a backend declares
    itself serial-only.  Outcomes come back in input order.
    """
    if concurrency_limit < 1:
        raise ValueError("concurrency_limit must be at least 1")
    if not (
        getattr(c2t_backend, "concurrency_safe", True)
        and getattr(rectifier_backend, "concurrency_safe", True)
    ):
        concurrency_limit = 1

    def run(index: int) -> BatchOutcome:
        chart, caption = items[index]
        try:
            result = correct_caption(
                chart,
                caption,
                c2t_backend,
                rectifier_backend,
                max_edit_ratio=max_edit_ratio,
            )
            return BatchOutcome(index=index, result=result)
        except (BackendError, ValueError) as exc:
            return BatchOutcome(index=index, result=None, error=str(exc))

    if concurrency_limit == 1 or len(items) <= 1:
        return [run(i) for i in range(len(items))]
    with ThreadPoolExecutor(max_workers=concurrency_limit) as pool:
        return list(pool.map(run, range(len(items))))
