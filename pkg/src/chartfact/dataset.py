"""Annotated chart-caption datasets: schema, aggregation, statistics.

Instances carry a chart reference, the caption split into sentences, and
per-sentence error annotations from several raters.  Raters mark each
sentence with zero or more error types; every type except Grammatical
makes a sentence factually wrong.  Captions group into three splits by
the kind of system that produced them: LVLM (large vision-language
models), LLM (table-prompted language models), and FT (fine-tuned
captioning models).

Two on-disk layouts are supported: a native JSONL schema written by this
package, and an import adapter for the publicly released CHOCOLATE
benchmark files (see load_chocolate_release for the accepted layout).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Sequence

from .table import ChartRef, parse_linearized, serialize_linearized
from .text import Caption


class ErrorType(str, Enum):
    VALUE = "Value"
    LABEL = "Label"
    TREND = "Trend"
    MAGNITUDE = "Magnitude"
    OUT_OF_CONTEXT = "OutOfContext"
    NONSENSE = "Nonsense"
    GRAMMATICAL = "Grammatical"


# Grammatical problems do not make a sentence factually wrong.
FACTUAL_ERROR_TYPES = frozenset(t for t in ErrorType if t is not ErrorType.GRAMMATICAL)


class Split(str, Enum):
    LVLM = "LVLM"
    LLM = "LLM"
    FT = "FT"


# Source model -> split, keyed on a normalized (lowercase, alphanumeric)
# form of the model name.
_MODEL_SPLITS = {
    "gpt4v": Split.LVLM,
    "bard": Split.LVLM,
    "deplotgpt4": Split.LLM,
    "chartt5": Split.FT,
    "unichart": Split.FT,
    "matcha": Split.FT,
}

_DATASET_ORIGINS = ("vistext", "pew")

_ERROR_ALIASES = {
    "value": ErrorType.VALUE,
    "label": ErrorType.LABEL,
    "trend": ErrorType.TREND,
    "magnitude": ErrorType.MAGNITUDE,
    "outofcontext": ErrorType.OUT_OF_CONTEXT,
    "ooc": ErrorType.OUT_OF_CONTEXT,
    "nonsense": ErrorType.NONSENSE,
    "grammatical": ErrorType.GRAMMATICAL,
}


class SchemaViolationError(ValueError):
    """A dataset record that does not satisfy the schema."""

    def __init__(self, instance_id: str, path: str, message: str):
        self.instance_id = instance_id
        self.path = path
        super().__init__(f"instance {instance_id!r}, field {path}: {message}")


def _normalize_key(text: str) -> str:
    return "".join(ch for ch in text.lower() if ch.isalnum())


def split_for_model(source_model: str) -> Split:
    """Dataset split implied by the caption's source model."""
    key = _normalize_key(source_model)
    if key not in _MODEL_SPLITS:
        raise ValueError(f"unknown source model {source_model!r}")
    return _MODEL_SPLITS[key]


def parse_error_type(text: str) -> ErrorType:
    """Normalize one error-type spelling ("value_error", "Value", ...)."""
    key = _normalize_key(text)
    if key.endswith("error"):
        key = key[: -len("error")]
    if key not in _ERROR_ALIASES:
        raise ValueError(f"unknown error type {text!r}")
    return _ERROR_ALIASES[key]


def aggregate_annotations(
    per_annotator: Sequence[Iterable[ErrorType]],
) -> frozenset[ErrorType]:
    """Resolve one sentence's annotator sets by strict majority.

    A type is present when more than half the annotators marked it; an
    exact half-half tie resolves to present.
    """
    if len(per_annotator) < 2:
        raise ValueError("need at least two annotators")
    n = len(per_annotator)
    tally: dict[ErrorType, int] = {}
    for labels in per_annotator:
        for t in labels:
            tally[t] = tally.get(t, 0) + 1
    return frozenset(t for t, count in tally.items() if 2 * count >= n)


@dataclass(frozen=True)
class AnnotatedInstance:
    """One caption for one chart, with per-sentence error annotations."""

    id: str
    source_model: str
    dataset_origin: str
    chart: ChartRef
    caption: Caption
    annotations: tuple[tuple[frozenset[ErrorType], ...], ...]

    def __post_init__(self):
        if len(self.annotations) != len(self.caption.sentences):
            raise ValueError(
                f"instance {self.id!r}: {len(self.annotations)} annotation rows "
                f"for {len(self.caption.sentences)} sentences"
            )
        if self.dataset_origin not in _DATASET_ORIGINS:
            raise ValueError(f"unknown dataset origin {self.dataset_origin!r}")
        split_for_model(self.source_model)

    @property
    def split(self) -> Split:
        return split_for_model(self.source_model)

    @property
    def resolved_labels(self) -> tuple[frozenset[ErrorType], ...]:
        """Majority-aggregated error types, one set per sentence."""
        return tuple(aggregate_annotations(per_sent) for per_sent in self.annotations)

    @property
    def sentence_factuality(self) -> tuple[bool, ...]:
        return tuple(
            not (labels & FACTUAL_ERROR_TYPES) for labels in self.resolved_labels
        )

    @property
    def caption_factual(self) -> bool:
        return all(self.sentence_factuality)


@dataclass(frozen=True)
class SplitCounts:
    sentence_factual: int = 0
    sentence_nonfactual: int = 0
    caption_factual: int = 0
    caption_nonfactual: int = 0

    @property
    def sentence_total(self) -> int:
        return self.sentence_factual + self.sentence_nonfactual

    @property
    def caption_total(self) -> int:
        return self.caption_factual + self.caption_nonfactual


@dataclass(frozen=True)
class SplitStats:
    per_split: dict
    total: SplitCounts


def split_stats(instances: Sequence[AnnotatedInstance]) -> SplitStats:
    """Factual/non-factual sentence and caption counts, per split and total."""
    tallies = {split: [0, 0, 0, 0] for split in Split}
    for inst in instances:
        t = tallies[inst.split]
        for ok in inst.sentence_factuality:
            t[0 if ok else 1] += 1
        t[2 if inst.caption_factual else 3] += 1
    per_split = {split: SplitCounts(*vals) for split, vals in tallies.items()}
    total = SplitCounts(
        *(sum(vals[i] for vals in tallies.values()) for i in range(4))
    )
    return SplitStats(per_split=per_split, total=total)


def _require(record: dict, key: str, instance_id: str):
    if key not in record:
        raise SchemaViolationError(instance_id, key, "missing required field")
    return record[key]


def _instance_from_native(record: dict, lineno: int) -> AnnotatedInstance:
    instance_id = str(record.get("id", f"line {lineno}"))
    source_model = _require(record, "source_model", instance_id)
    dataset_origin = _require(record, "dataset_origin", instance_id)
    chart_rec = _require(record, "chart", instance_id)
    sentences = _require(record, "sentences", instance_id)
    annotations = _require(record, "annotations", instance_id)
    if not isinstance(chart_rec, dict):
        raise SchemaViolationError(instance_id, "chart", "must be an object")
    if not isinstance(sentences, list) or not sentences:
        raise SchemaViolationError(instance_id, "sentences", "must be a non-empty list")
    if not isinstance(annotations, list) or len(annotations) != len(sentences):
        raise SchemaViolationError(
            instance_id, "annotations", "must have one row per sentence"
        )
    try:
        gold_table = None
        if chart_rec.get("table_linearized") is not None:
            gold_table = parse_linearized(
                chart_rec["table_linearized"], title=chart_rec.get("title")
            )
        chart = ChartRef(
            id=str(chart_rec.get("id", instance_id)),
            image_uri=chart_rec.get("image_uri"),
            gold_table=gold_table,
        )
    except ValueError as exc:
        raise SchemaViolationError(instance_id, "chart", str(exc)) from exc
    try:
        caption = Caption.from_sentences([str(s) for s in sentences])
    except ValueError as exc:
        raise SchemaViolationError(instance_id, "sentences", str(exc)) from exc
    parsed_annotations = []
    for si, per_sentence in enumerate(annotations):
        if not isinstance(per_sentence, list) or len(per_sentence) < 2:
            raise SchemaViolationError(
                instance_id,
                f"annotations[{si}]",
                "each sentence needs at least two annotator lists",
            )
        row = []
        for ai, labels in enumerate(per_sentence):
            if not isinstance(labels, list):
                raise SchemaViolationError(
                    instance_id, f"annotations[{si}][{ai}]", "must be a list"
                )
            try:
                row.append(frozenset(parse_error_type(t) for t in labels))
            except ValueError as exc:
                raise SchemaViolationError(
                    instance_id, f"annotations[{si}][{ai}]", str(exc)
                ) from exc
        parsed_annotations.append(tuple(row))
    try:
        return AnnotatedInstance(
            id=instance_id,
            source_model=str(source_model),
            dataset_origin=str(dataset_origin).lower(),
            chart=chart,
            caption=caption,
            annotations=tuple(parsed_annotations),
        )
    except ValueError as exc:
        raise SchemaViolationError(instance_id, "-", str(exc)) from exc


def load_dataset(path) -> list[AnnotatedInstance]:
    """Load instances from the native JSONL schema, validating as it goes."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaViolationError(f"line {lineno}", "-", str(exc)) from exc
            out.append(_instance_from_native(record, lineno))
    return out


def instance_to_record(inst: AnnotatedInstance) -> dict:
    chart: dict = {"id": inst.chart.id}
    if inst.chart.image_uri is not None:
        chart["image_uri"] = inst.chart.image_uri
    if inst.chart.gold_table is not None:
        if inst.chart.gold_table.title is not None:
            chart["title"] = inst.chart.gold_table.title
        chart["table_linearized"] = serialize_linearized(inst.chart.gold_table)
    return {
        "id": inst.id,
        "source_model": inst.source_model,
        "dataset_origin": inst.dataset_origin,
        "chart": chart,
        "sentences": [s.text for s in inst.caption.sentences],
        "annotations": [
            [sorted(t.value for t in annotator) for annotator in per_sentence]
            for per_sentence in inst.annotations
        ],
    }


def save_dataset(instances: Iterable[AnnotatedInstance], fh: IO[str]) -> None:
    for inst in instances:
        fh.write(json.dumps(instance_to_record(inst), ensure_ascii=False))
        fh.write("\n")


def _instance_from_release(record: dict, ordinal: int) -> AnnotatedInstance:
    instance_id = str(record.get("id", f"release-{ordinal:05d}"))
    model = _require(record, "model", instance_id)
    dataset = _require(record, "dataset", instance_id)
    sentences = _require(record, "sentences", instance_id)
    annotations = _require(record, "annotations", instance_id)
    native = {
        "id": instance_id,
        "source_model": model,
        "dataset_origin": dataset,
        "chart": {
            "id": str(record.get("image", instance_id)),
            "image_uri": record.get("image"),
            "table_linearized": record.get("table_linearized"),
            "title": record.get("title"),
        },
        "sentences": sentences,
        "annotations": annotations,
    }
    return _instance_from_native(native, ordinal)


def load_chocolate_release(path) -> list[AnnotatedInstance]:
    """Import the released CHOCOLATE annotation files.

    Accepts a JSON file holding a list of instances, or a directory of
    such files (every ``*.json``, in name order).  Each instance needs:

    * ``model``: the captioning system ("GPT-4V", "Bard", "DePlot +
      GPT-4", "ChartT5", "UniChart", "MatCha"); decides the split.
    * ``dataset``: "vistext" or "pew".
    * ``sentences``: the caption's sentences, in order.
    * ``annotations``: per sentence, one list of error-type strings per
      annotator (spellings such as "value_error" are normalized).
    * optional ``id``, ``image``, ``title``, ``table_linearized``.
    """
    if os.path.isdir(path):
        files = sorted(
            os.path.join(path, name)
            for name in os.listdir(path)
            if name.endswith(".json")
        )
        if not files:
            raise SchemaViolationError(str(path), "-", "directory has no .json files")
    else:
        files = [path]
    instances = []
    for file_path in files:
        with open(file_path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, list):
            raise SchemaViolationError(
                str(file_path), "-", "release file must hold a JSON list"
            )
        for record in data:
            instances.append(_instance_from_release(record, len(instances)))
    return instances
