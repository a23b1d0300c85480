"""Table-guided negative caption generation for entailment training data.

Three corruption families turn a truthful caption sentence into a
contradicted one: swapping a mentioned cell value for a different value
from the same column, inverting a trend term via the antonym lexicon,
and pairing the chart with a sentence lifted from a different chart.
Positives are kept alongside, labeled, split, and written out as one
JSON record per line.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Sequence

from .table import ChartRef, Table, parse_linearized, serialize_linearized
from .text import TrendLexicon, find_trend_terms, find_value_mentions

DEFAULT_SPLIT_RATIO = (522, 36, 37)
SPLIT_NAMES = ("train", "dev", "test")


class InsufficientCorpusError(ValueError):
    """Raised when out-of-context sampling has no other chart to draw from."""


class NegativeFamily(str, Enum):
    VALUE_LABEL = "value_label"
    TREND = "trend"
    OUT_OF_CONTEXT = "ooc"


class EntailmentLabel(str, Enum):
    ENTAILMENT = "entailment"
    NOT_ENTAILMENT = "not_entailment"


ORIGIN_REPURPOSED_CAPTION = "repurposed_caption"
ORIGIN_REPURPOSED_QA = "repurposed_qa"
_POSITIVE_ORIGINS = {ORIGIN_REPURPOSED_CAPTION, ORIGIN_REPURPOSED_QA}


@dataclass(frozen=True)
class ValueLabelProvenance:
    span: tuple[int, int]
    old_cell: tuple[int, int]
    new_cell: tuple[int, int]
    positive: str


@dataclass(frozen=True)
class TrendProvenance:
    span: tuple[int, int]
    old_term: str
    new_term: str
    positive: str


@dataclass(frozen=True)
class OutOfContextProvenance:
    source_chart_id: str
    positive: str


Provenance = ValueLabelProvenance | TrendProvenance | OutOfContextProvenance


@dataclass(frozen=True)
class NegativeSample:
    """One corrupted sentence with enough provenance to audit it."""

    chart_id: str
    positive: str
    negative: str
    family: NegativeFamily
    provenance: Provenance

    def __post_init__(self):
        if self.negative == self.positive:
            raise ValueError("negative must differ from its positive")


@dataclass(frozen=True)
class EntailmentInstance:
    """One labeled sentence of the generated dataset."""

    chart_id: str
    sentence: str
    label: EntailmentLabel
    origin: str
    provenance: Provenance | None = None
    split: str | None = None

    def __post_init__(self):
        is_positive = self.origin in _POSITIVE_ORIGINS
        if is_positive != (self.label is EntailmentLabel.ENTAILMENT):
            raise ValueError(
                "label must be entailment exactly for repurposed positives"
            )

    def to_record(self) -> dict:
        prov = None
        if self.provenance is not None:
            prov = dict(self.provenance.__dict__)
            for key in ("span", "old_cell", "new_cell"):
                if key in prov:
                    prov[key] = list(prov[key])
        return {
            "chart_id": self.chart_id,
            "sentence": self.sentence,
            "label": self.label.value,
            "origin": self.origin,
            "provenance": prov,
            "split": self.split,
        }


@dataclass(frozen=True)
class CorpusChart:
    """A chart with its truthful sentences, the unit of generation."""

    chart: ChartRef
    sentences: tuple[str, ...]
    qa_sentences: tuple[str, ...] = ()

    def __post_init__(self):
        if self.chart.gold_table is None:
            raise ValueError(f"corpus chart {self.chart.id!r} needs a gold table")

    @property
    def positives(self) -> tuple[str, ...]:
        return self.sentences + self.qa_sentences


@dataclass(frozen=True)
class GenerationConfig:
    families: tuple[str, ...] = tuple(f.value for f in NegativeFamily)
    max_per_sentence: int = 2
    split_ratio: tuple[int, int, int] = DEFAULT_SPLIT_RATIO

    def __post_init__(self):
        known = {f.value for f in NegativeFamily}
        for fam in self.families:
            if fam not in known:
                raise ValueError(f"unknown negative family {fam!r}")
        if self.max_per_sentence < 0:
            raise ValueError("max_per_sentence must be non-negative")
        if len(self.split_ratio) != 3 or any(r < 0 for r in self.split_ratio) or sum(self.split_ratio) == 0:
            raise ValueError("split ratio needs three non-negative weights")


def derive_seed(seed: int, *parts: str) -> int:
    """A stable per-stream seed from the master seed and a name."""
    digest = hashlib.sha256(
        ("%d\x00" % seed + "\x00".join(parts)).encode("utf-8")
    ).digest()
    return int.from_bytes(digest[:8], "big")


def _value_label_negatives(
    table: Table, positive: str, rng: random.Random, max_per_sentence: int, chart_id: str
) -> list[NegativeSample]:
    candidates = []
    for mention in find_value_mentions(positive, table):
        row, col = mention.source.row, mention.source.col
        old_raw = table.rows[row][col].raw
        if mention.matched_text != old_raw:
            # Variant matches (grouped digits, canonical forms) are reported
            # by the matcher but are not substitution sites: the span has to
            # hold the cell text verbatim so the swap is exactly reversible.
            continue
        column = table.column(col)
        rows_with_new_value = [
            r for r, cell in enumerate(column) if cell.raw != old_raw
        ]
        if not rows_with_new_value:
            continue
        new_row = rng.choice(rows_with_new_value)
        new_raw = column[new_row].raw
        negative = positive[: mention.start] + new_raw + positive[mention.end :]
        candidates.append(
            NegativeSample(
                chart_id=chart_id,
                positive=positive,
                negative=negative,
                family=NegativeFamily.VALUE_LABEL,
                provenance=ValueLabelProvenance(
                    span=(mention.start, mention.end),
                    old_cell=(row, col),
                    new_cell=(new_row, col),
                    positive=positive,
                ),
            )
        )
    if len(candidates) > max_per_sentence:
        picked = sorted(rng.sample(range(len(candidates)), max_per_sentence))
        candidates = [candidates[i] for i in picked]
    return candidates


def gen_value_label_negatives(
    table: Table,
    positive_sentence: str,
    rng_seed: int,
    max_per_sentence: int = 2,
    chart_id: str = "",
) -> list[NegativeSample]:
    """Swap mentioned cell values for same-column alternatives.

    Each mention whose span holds a cell's raw text verbatim yields at
    most one sample; at most ``max_per_sentence`` of them are kept,
    chosen uniformly without replacement.
    """
    rng = random.Random(rng_seed)
    return _value_label_negatives(
        table, positive_sentence, rng, max_per_sentence, chart_id
    )


def gen_trend_negatives(
    positive_sentence: str, lexicon: TrendLexicon | None = None, chart_id: str = ""
) -> list[NegativeSample]:
    """Invert each trend term via its antonym, carrying the inflection.

    Purely deterministic: one sample per matched term, in span order.
    """
    if lexicon is None:
        lexicon = TrendLexicon.default()
    out = []
    for mention in find_trend_terms(positive_sentence, lexicon):
        replacement = lexicon.antonym_surface(mention.matched_text)
        negative = (
            positive_sentence[: mention.start]
            + replacement
            + positive_sentence[mention.end :]
        )
        out.append(
            NegativeSample(
                chart_id=chart_id,
                positive=positive_sentence,
                negative=negative,
                family=NegativeFamily.TREND,
                provenance=TrendProvenance(
                    span=(mention.start, mention.end),
                    old_term=mention.matched_text,
                    new_term=replacement,
                    positive=positive_sentence,
                ),
            )
        )
    return out


def _ooc_negative(
    chart_id: str,
    positive: str,
    corpus: Sequence[CorpusChart],
    rng: random.Random,
) -> NegativeSample | None:
    eligible: list[tuple[str, list[str]]] = []
    for entry in corpus:
        if entry.chart.id == chart_id:
            continue
        sentences = [s for s in entry.positives if s != positive]
        if sentences:
            eligible.append((entry.chart.id, sentences))
    if not any(entry.chart.id != chart_id for entry in corpus):
        raise InsufficientCorpusError(
            "out-of-context sampling needs at least two charts"
        )
    if not eligible:
        return None
    # Sort by source id so the draw depends on the corpus set, not its order.
    eligible.sort(key=lambda pair: pair[0])
    source_id, sentences = eligible[rng.randrange(len(eligible))]
    negative = sentences[rng.randrange(len(sentences))]
    return NegativeSample(
        chart_id=chart_id,
        positive=positive,
        negative=negative,
        family=NegativeFamily.OUT_OF_CONTEXT,
        provenance=OutOfContextProvenance(source_chart_id=source_id, positive=positive),
    )


def gen_ooc_negatives(
    chart_id: str, positive_sentence: str, corpus: Sequence[CorpusChart], rng_seed: int
) -> NegativeSample | None:
    """Pair one positive sentence with a sentence from a different chart."""
    rng = random.Random(rng_seed)
    return _ooc_negative(chart_id, positive_sentence, corpus, rng)


def assign_splits(
    chart_ids: Sequence[str],
    rng_seed: int,
    ratio: tuple[int, int, int] = DEFAULT_SPLIT_RATIO,
) -> dict[str, str]:
    """Deterministically shuffle chart ids into train/dev/test by ratio."""
    ids = list(chart_ids)
    if len(set(ids)) != len(ids):
        raise ValueError("chart ids must be unique")
    # Canonical order before the shuffle: the outcome is a function of the
    # id set and seed, not of presentation order.
    ids.sort()
    rng = random.Random(derive_seed(rng_seed, "split"))
    rng.shuffle(ids)
    total = sum(ratio)
    n = len(ids)
    n_train = n * ratio[0] // total
    n_dev = n * ratio[1] // total
    assignment = {}
    for pos, cid in enumerate(ids):
        if pos < n_train:
            assignment[cid] = SPLIT_NAMES[0]
        elif pos < n_train + n_dev:
            assignment[cid] = SPLIT_NAMES[1]
        else:
            assignment[cid] = SPLIT_NAMES[2]
    return assignment


def generate_all(
    corpus: Sequence[CorpusChart],
    lexicon: TrendLexicon | None = None,
    rng_seed: int = 0,
    config: GenerationConfig | None = None,
) -> list[EntailmentInstance]:
    """Run every enabled corruption family over a corpus.

    Each chart draws from its own seeded random stream derived from
    (rng_seed, chart id), so per-chart output does not depend on corpus
    order, and identical inputs reproduce identical output.
    """
    if lexicon is None:
        lexicon = TrendLexicon.default()
    if config is None:
        config = GenerationConfig()
    families = set(config.families)
    if NegativeFamily.OUT_OF_CONTEXT.value in families and len(corpus) < 2:
        raise InsufficientCorpusError(
            "out-of-context sampling needs at least two charts"
        )
    splits = assign_splits([c.chart.id for c in corpus], rng_seed, config.split_ratio)
    instances: list[EntailmentInstance] = []
    for entry in corpus:
        cid = entry.chart.id
        split = splits[cid]
        rng = random.Random(derive_seed(rng_seed, cid))
        table = entry.chart.gold_table
        for origin, sentences in (
            (ORIGIN_REPURPOSED_CAPTION, entry.sentences),
            (ORIGIN_REPURPOSED_QA, entry.qa_sentences),
        ):
            for sent in sentences:
                instances.append(
                    EntailmentInstance(
                        chart_id=cid,
                        sentence=sent,
                        label=EntailmentLabel.ENTAILMENT,
                        origin=origin,
                        split=split,
                    )
                )
        for positive in entry.positives:
            samples: list[NegativeSample] = []
            if NegativeFamily.VALUE_LABEL.value in families:
                samples.extend(
                    _value_label_negatives(
                        table, positive, rng, config.max_per_sentence, cid
                    )
                )
            if NegativeFamily.TREND.value in families:
                trend = gen_trend_negatives(positive, lexicon, cid)
                samples.extend(trend[: config.max_per_sentence])
            if NegativeFamily.OUT_OF_CONTEXT.value in families:
                ooc = _ooc_negative(cid, positive, corpus, rng)
                if ooc is not None:
                    samples.append(ooc)
            for sample in samples:
                instances.append(
                    EntailmentInstance(
                        chart_id=cid,
                        sentence=sample.negative,
                        label=EntailmentLabel.NOT_ENTAILMENT,
                        origin=f"generated:{sample.family.value}",
                        provenance=sample.provenance,
                        split=split,
                    )
                )
    return instances


def write_instances(instances: Iterable[EntailmentInstance], fh: IO[str]) -> None:
    for inst in instances:
        fh.write(json.dumps(inst.to_record(), ensure_ascii=False))
        fh.write("\n")


def instance_from_record(record: dict) -> EntailmentInstance:
    prov_data = record.get("provenance")
    provenance: Provenance | None = None
    if prov_data is not None:
        if "old_cell" in prov_data:
            provenance = ValueLabelProvenance(
                span=tuple(prov_data["span"]),
                old_cell=tuple(prov_data["old_cell"]),
                new_cell=tuple(prov_data["new_cell"]),
                positive=prov_data["positive"],
            )
        elif "old_term" in prov_data:
            provenance = TrendProvenance(
                span=tuple(prov_data["span"]),
                old_term=prov_data["old_term"],
                new_term=prov_data["new_term"],
                positive=prov_data["positive"],
            )
        else:
            provenance = OutOfContextProvenance(
                source_chart_id=prov_data["source_chart_id"],
                positive=prov_data["positive"],
            )
    return EntailmentInstance(
        chart_id=record["chart_id"],
        sentence=record["sentence"],
        label=EntailmentLabel(record["label"]),
        origin=record["origin"],
        provenance=provenance,
        split=record.get("split"),
    )


def read_corpus(path) -> list[CorpusChart]:
    """Read a chart corpus: one chart per JSONL line.

    Fields: id, table_linearized; optional sentences, title, image_uri,
    qa_sentences.  Charts without sentences are legal (they can still be
    scored or corrected against) but contribute no generation positives.
    """
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                table = parse_linearized(
                    rec["table_linearized"], title=rec.get("title")
                )
                chart = ChartRef(
                    id=rec["id"],
                    image_uri=rec.get("image_uri"),
                    gold_table=table,
                )
                out.append(
                    CorpusChart(
                        chart=chart,
                        sentences=tuple(rec.get("sentences", ())),
                        qa_sentences=tuple(rec.get("qa_sentences", ())),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"corpus line {lineno}: {exc}") from exc
    return out


def write_corpus(corpus: Iterable[CorpusChart], fh: IO[str]) -> None:
    for entry in corpus:
        rec = {
            "id": entry.chart.id,
            "title": entry.chart.gold_table.title,
            "table_linearized": serialize_linearized(entry.chart.gold_table),
            "sentences": list(entry.sentences),
        }
        if entry.chart.image_uri is not None:
            rec["image_uri"] = entry.chart.image_uri
        if entry.qa_sentences:
            rec["qa_sentences"] = list(entry.qa_sentences)
        fh.write(json.dumps(rec, ensure_ascii=False))
        fh.write("\n")
