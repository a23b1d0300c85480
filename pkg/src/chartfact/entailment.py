"""Visual-entailment factuality scoring for caption sentences.

A backend answers one yes/no entailment query per sentence with a pair
of logits.  The sentence score is the softmax probability of "yes";
a caption's score is the minimum over its sentences, so one unsupported
sentence sinks the whole caption.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import MutableMapping, Protocol, Sequence, runtime_checkable

from .table import ChartRef, Table, single_numeric_column
from .text import Caption, Sentence, TrendLexicon, find_trend_terms
from . import wire
from .wire import BackendUnavailableError

PROMPT_PREFIX = 'Does the image entail this statement: "'
PROMPT_SUFFIX = '"?'

# Pseudo-logit magnitude for backends that answer with a bare yes/no token.
YES_NO_LOGIT = 10.0

# Logit magnitude used by the table oracle.
_ORACLE_LOGIT = 2.0

_REL_TOL = 1e-9

# Boundaries keep digits glued to words ("Q2", "2nd") from parsing as numbers.
_NUMBER_TOKEN_RE = re.compile(
    r"(?<![\w.,])[$€£]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?"
    r"(?:\s?(?:thousand|million|billion|trillion))?%?(?!\w)",
    re.IGNORECASE,
)


class EmptyCaptionError(ValueError):
    """Raised when scoring a caption with no sentences."""


@dataclass(frozen=True)
class EntailmentLogits:
    """Raw yes/no logits from one entailment query."""

    logit_yes: float
    logit_no: float

    def __post_init__(self):
        for v in (self.logit_yes, self.logit_no):
            if not math.isfinite(v):
                raise ValueError("logits must be finite")


@dataclass(frozen=True)
class FactualityReport:
    """Scores for one caption: per-sentence and min-pooled."""

    per_sentence: tuple[tuple[int, float], ...]
    caption_score: float
    backend_id: str


@runtime_checkable
class EntailmentBackend(Protocol):
    backend_id: str
    concurrency_safe: bool

    def score(self, subject: ChartRef | Table, prompt: str) -> EntailmentLogits:
        ...


def build_prompt(sentence: Sentence | str) -> str:
    """Render the fixed entailment question for one sentence."""
    text = sentence.text if isinstance(sentence, Sentence) else sentence
    if not text.strip():
        raise ValueError("cannot build a prompt for an empty sentence")
    return f"{PROMPT_PREFIX}{text}{PROMPT_SUFFIX}"


def sentence_from_prompt(prompt: str) -> str:
    """Recover the quoted sentence from a prompt built by build_prompt."""
    if not (prompt.startswith(PROMPT_PREFIX) and prompt.endswith(PROMPT_SUFFIX)):
        raise ValueError("prompt does not follow the entailment template")
    return prompt[len(PROMPT_PREFIX) : -len(PROMPT_SUFFIX)]


def sentence_score(logits: EntailmentLogits) -> float:
    """Softmax probability of "yes" over the two logits, overflow-safe."""
    m = max(logits.logit_yes, logits.logit_no)
    ey = math.exp(logits.logit_yes - m)
    en = math.exp(logits.logit_no - m)
    return ey / (ey + en)


def caption_score(sentence_scores: Sequence[float]) -> float:
    """Min-pool sentence scores into the caption score."""
    if not sentence_scores:
        raise EmptyCaptionError("caption has no sentences to pool")
    return min(sentence_scores)


def logits_from_yes_no(answer: str) -> EntailmentLogits:
    """Map a bare yes/no answer to pseudo-logits of fixed magnitude."""
    token = answer.strip().lower().rstrip(".!")
    if token == "yes":
        return EntailmentLogits(YES_NO_LOGIT, -YES_NO_LOGIT)
    if token == "no":
        return EntailmentLogits(-YES_NO_LOGIT, YES_NO_LOGIT)
    raise ValueError(f"expected a yes/no answer, got {answer!r}")


def score_caption(
    chart: ChartRef | Table,
    caption: Caption,
    backend: EntailmentBackend,
    *,
    cache: MutableMapping[str, EntailmentLogits] | None = None,
) -> FactualityReport:
    """Score every sentence of a caption against one chart.

    Each distinct (chart, sentence) request is sent to the backend once;
    a shared ``cache`` keyed by request content hash carries answers
    across captions in a batch.  Backend failures surface as
    BackendUnavailableError tagged with the sentence index.
    """
    if not caption.sentences:
        raise EmptyCaptionError("caption has no sentences")
    per_sentence = []
    for s in caption.sentences:
        prompt = build_prompt(s)
        key = wire.request_hash(wire.ROUTE_ENTAIL, wire.entail_envelope(chart, prompt))
        logits = cache.get(key) if cache is not None else None
        if logits is None:
            try:
                logits = backend.score(chart, prompt)
            except BackendUnavailableError as exc:
                raise BackendUnavailableError(
                    f"sentence {s.index}: {exc}"
                ) from exc
            if cache is not None:
                cache[key] = logits
        per_sentence.append((s.index, sentence_score(logits)))
    return FactualityReport(
        per_sentence=tuple(per_sentence),
        caption_score=caption_score([v for _, v in per_sentence]),
        backend_id=backend.backend_id,
    )


def _sentence_numbers(text: str) -> list[float]:
    from .table import parse_cell_number

    values = []
    for m in _NUMBER_TOKEN_RE.finditer(text):
        parsed = parse_cell_number(m.group(0))
        if parsed is not None:
            values.append(parsed.effective_value)
    return values


def _table_numbers(table: Table) -> list[float]:
    values = []
    for _, _, cell in table.cells():
        if cell.numeric is not None:
            values.append(cell.numeric.effective_value)
    for name in table.header:
        for tok in re.findall(r"\d+(?:\.\d+)?", name):
            v = float(tok)
            if v == int(v) and 1000 <= v <= 2999:
                values.append(v)
    return values


def _matches_any(value: float, pool: Sequence[float]) -> bool:
    return any(math.isclose(value, p, rel_tol=_REL_TOL) for p in pool)


def oracle_logits(
    table: Table, sentence: Sentence | str, lexicon: TrendLexicon | None = None
) -> EntailmentLogits:
    """Deterministic entailment logits computed from the table itself.

    The oracle flags a sentence when (a) it mentions a number matching no
    numeric cell and no year-like header token, or (b) it states a trend
    whose direction contradicts the sign of last-minus-first in the
    table's single numeric column (tables with two or more numeric
    columns, or fewer than two rows, skip the trend check).  Flagged
    sentences get logits (-2, +2), everything else (+2, -2).
    """
    text = sentence.text if isinstance(sentence, Sentence) else sentence
    if lexicon is None:
        lexicon = TrendLexicon.default()
    violation = False
    pool = _table_numbers(table)
    for value in _sentence_numbers(text):
        if not _matches_any(value, pool):
            violation = True
            break
    if not violation and table.row_count >= 2:
        col = single_numeric_column(table)
        if col is not None:
            cells = table.column(col)
            diff = cells[-1].numeric.effective_value - cells[0].numeric.effective_value
            for match in find_trend_terms(text, lexicon):
                claimed_up = lexicon.is_upward(match.source.polarity)
                if (claimed_up and diff < 0) or (not claimed_up and diff > 0):
                    violation = True
                    break
    if violation:
        return EntailmentLogits(-_ORACLE_LOGIT, _ORACLE_LOGIT)
    return EntailmentLogits(_ORACLE_LOGIT, -_ORACLE_LOGIT)
