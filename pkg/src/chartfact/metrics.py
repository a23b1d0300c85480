"""Evaluation metrics: edit distance, rank correlation, ROC AUC, table
similarity, and annotation-agreement statistics.

Each metric follows its textbook definition; the test suite pins every
one of them against an independent brute-force oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .table import Table
from .dataset import AnnotatedInstance, ErrorType, FACTUAL_ERROR_TYPES


class DegenerateSeriesError(ValueError):
    """Raised when both series of a rank correlation are constant."""


class SingleClassError(ValueError):
    """Raised when ROC AUC is asked to rank a single-class label set."""


class DegenerateAgreementError(ValueError):
    """Raised when expected agreement is 1 and kappa is undefined."""


def levenshtein(a: str, b: str) -> int:
    """Minimum number of character insertions, deletions, substitutions."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


def normalized_levenshtein(a: str, b: str) -> float:
    """Levenshtein scaled into [0, 1] by the longer string's length."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


def _count_inversions(values: list, lo: int, hi: int, scratch: list) -> int:
    if hi - lo <= 1:
        return 0
    mid = (lo + hi) // 2
    count = _count_inversions(values, lo, mid, scratch)
    count += _count_inversions(values, mid, hi, scratch)
    i, j, k = lo, mid, lo
    while i < mid and j < hi:
        if values[j] < values[i]:
            count += mid - i
            scratch[k] = values[j]
            j += 1
        else:
            scratch[k] = values[i]
            i += 1
        k += 1
    scratch[k:hi] = values[i:mid] if i < mid else values[j:hi]
    values[lo:hi] = scratch[lo:hi]
    return count


def _tie_count(values: Sequence) -> int:
    total = 0
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    for g in counts.values():
        total += g * (g - 1) // 2
    return total


def kendall_tau(metric_scores: Sequence[float], human_scores: Sequence[float]) -> float | None:
    """Kendall's tau-b between two paired score series.

    Concordant/discordant/tie counts come from a merge-sort inversion
    count; the statistic is (C - D) / sqrt((C + D + Tx)(C + D + Ty)).
    Returns None when exactly one series is constant (one denominator
    factor is zero); raises DegenerateSeriesError when both are.
    """
    x = list(metric_scores)
    y = list(human_scores)
    if len(x) != len(y):
        raise ValueError("series must have equal length")
    n = len(x)
    if n < 2:
        raise ValueError("need at least two pairs")
    x_constant = all(v == x[0] for v in x)
    y_constant = all(v == y[0] for v in y)
    if x_constant and y_constant:
        raise DegenerateSeriesError("both series are constant")
    n0 = n * (n - 1) // 2
    n1 = _tie_count(x)
    n2 = _tie_count(y)
    n3 = _tie_count(list(zip(x, y)))
    order = sorted(range(n), key=lambda i: (x[i], y[i]))
    ys = [y[i] for i in order]
    discordant = _count_inversions(ys, 0, n, [None] * n)
    concordant = n0 - n1 - n2 + n3 - discordant
    tx = n1 - n3
    ty = n2 - n3
    denom_sq = (concordant + discordant + tx) * (concordant + discordant + ty)
    if denom_sq == 0:
        return None
    return (concordant - discordant) / math.sqrt(denom_sq)


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Probability a random positive outscores a random negative.

    Tied scores count half.  Computed from sorted score groups so the
    result equals all-pairs enumeration exactly.
    """
    if len(scores) != len(labels):
        raise ValueError("scores and labels must have equal length")
    for lab in labels:
        if lab not in (0, 1):
            raise ValueError("labels must be 0 or 1")
    n_pos = sum(labels)
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("need both a positive and a negative example")
    pairs = sorted(zip(scores, labels))
    wins = 0
    ties = 0
    negs_below = 0
    i = 0
    while i < len(pairs):
        j = i
        g_pos = 0
        g_neg = 0
        while j < len(pairs) and pairs[j][0] == pairs[i][0]:
            if pairs[j][1] == 1:
                g_pos += 1
            else:
                g_neg += 1
            j += 1
        wins += g_pos * negs_below
        ties += g_pos * g_neg
        negs_below += g_neg
        i = j
    return (2 * wins + ties) / (2 * n_pos * n_neg)


@dataclass(frozen=True)
class TableEntry:
    """One (row header, column header, value) triple of a table."""

    row_header: str
    col_header: str
    value_raw: str
    value_num: float | None


def table_entries(table: Table) -> list[TableEntry]:
    """Flatten a table into entries, treating column 0 as row headers."""
    entries = []
    for row in table.rows:
        for j in range(1, table.column_count):
            cell = row[j]
            num = cell.numeric.effective_value if cell.numeric is not None else None
            entries.append(TableEntry(row[0].raw, table.header[j], cell.raw, num))
    return entries


def entry_similarity(pred: TableEntry, gold: TableEntry) -> float:
    """Similarity in [0, 1]: header closeness times value closeness.

    The header term is one minus the normalized edit distance between
    the joined "row col" keys.  The value term uses relative numeric
    distance against the gold value, capped at 1, or plain string
    equality when the gold value is not numeric.
    """
    key_term = 1.0 - normalized_levenshtein(
        f"{pred.row_header} {pred.col_header}", f"{gold.row_header} {gold.col_header}"
    )
    if gold.value_num is not None:
        if pred.value_num is None:
            value_term = 0.0
        elif gold.value_num == 0:
            value_term = 1.0 if pred.value_num == 0 else 0.0
        else:
            rel = abs(pred.value_num - gold.value_num) / abs(gold.value_num)
            value_term = 1.0 - min(1.0, rel)
    else:
        value_term = 1.0 if pred.value_raw == gold.value_raw else 0.0
    return key_term * value_term


def rms_f1(predicted: Table, gold: Table) -> float:
    """F1 over an optimal one-to-one matching of table entries.

    Precision divides the matched similarity mass by the prediction's
    entry count, recall by the gold's; the assignment maximizing total
    similarity is found exactly.  Two empty tables score 1, an empty
    prediction against a non-empty gold scores 0.
    """
    pred_entries = table_entries(predicted)
    gold_entries = table_entries(gold)
    if not pred_entries and not gold_entries:
        return 1.0
    if not pred_entries or not gold_entries:
        return 0.0
    sim = np.zeros((len(pred_entries), len(gold_entries)))
    for i, p in enumerate(pred_entries):
        for j, g in enumerate(gold_entries):
            sim[i, j] = entry_similarity(p, g)
    rows, cols = linear_sum_assignment(sim, maximize=True)
    total = float(sim[rows, cols].sum())
    precision = total / len(pred_entries)
    recall = total / len(gold_entries)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def fleiss_kappa(counts: Sequence[Sequence[int]]) -> float:
    """Fleiss' kappa over an items-by-categories count matrix.

    Every item must be rated by the same number of raters (the row sum),
    at least two.  Raises DegenerateAgreementError when expected
    agreement is exactly 1 (all ratings in one category).
    """
    matrix = [list(row) for row in counts]
    if not matrix:
        raise ValueError("need at least one item")
    k = len(matrix[0])
    raters = sum(matrix[0])
    for row in matrix:
        if len(row) != k:
            raise ValueError("ragged count matrix")
        if any(v < 0 or v != int(v) for v in row):
            raise ValueError("counts must be non-negative integers")
        if sum(row) != raters:
            raise ValueError("every item needs the same number of ratings")
    if raters < 2:
        raise ValueError("need at least two raters")
    n_items = len(matrix)
    p_i = [
        (sum(v * v for v in row) - raters) / (raters * (raters - 1)) for row in matrix
    ]
    p_bar = sum(p_i) / n_items
    totals = [sum(row[j] for row in matrix) for j in range(k)]
    p_j = [t / (n_items * raters) for t in totals]
    p_e = sum(p * p for p in p_j)
    if p_e == 1.0:
        raise DegenerateAgreementError("all ratings fall in one category")
    return (p_bar - p_e) / (1 - p_e)


def majority_agreement(counts: Sequence[Sequence[int]]) -> float:
    """Percentage of items where one category holds a strict majority."""
    matrix = [list(row) for row in counts]
    if not matrix:
        raise ValueError("need at least one item")
    raters = sum(matrix[0])
    hits = 0
    for row in matrix:
        if sum(row) != raters:
            raise ValueError("every item needs the same number of ratings")
        if max(row) * 2 > raters:
            hits += 1
    return 100.0 * hits / len(matrix)


@dataclass
class GroupErrorRates:
    """Sentence and caption error tallies for one model on one dataset."""

    source_model: str
    dataset_origin: str
    sentence_total: int = 0
    sentence_factual: int = 0
    sentence_type_counts: dict = field(default_factory=dict)
    caption_total: int = 0
    caption_factual: int = 0

    def sentence_type_rate(self, error_type: ErrorType) -> float:
        if self.sentence_total == 0:
            return 0.0
        return self.sentence_type_counts.get(error_type, 0) / self.sentence_total

    @property
    def caption_factual_rate(self) -> float:
        if self.caption_total == 0:
            return 0.0
        return self.caption_factual / self.caption_total


@dataclass
class ErrorRateReport:
    sentence_total: int
    sentence_factual: int
    caption_total: int
    caption_factual: int
    groups: dict

    @property
    def sentence_nonfactual(self) -> int:
        return self.sentence_total - self.sentence_factual

    @property
    def caption_nonfactual(self) -> int:
        return self.caption_total - self.caption_factual

    @property
    def caption_nonfactual_pct(self) -> float:
        if self.caption_total == 0:
            return 0.0
        return round(100.0 * self.caption_nonfactual / self.caption_total, 2)


def error_rates(instances: Sequence[AnnotatedInstance]) -> ErrorRateReport:
    """Per-model, per-dataset error-type rates plus caption factual rates.

    A sentence counts toward a type when its resolved labels include it;
    it is factual when its resolved labels contain no factual-error type
    (grammatical problems alone leave a sentence factual).  A caption is
    factual when all its sentences are.
    """
    groups: dict[tuple[str, str], GroupErrorRates] = {}
    sentence_total = sentence_factual = 0
    caption_total = caption_factual = 0
    for inst in instances:
        key = (inst.source_model, inst.dataset_origin)
        group = groups.get(key)
        if group is None:
            group = GroupErrorRates(inst.source_model, inst.dataset_origin)
            groups[key] = group
        caption_ok = True
        for labels in inst.resolved_labels:
            sentence_total += 1
            group.sentence_total += 1
            for error_type in labels:
                group.sentence_type_counts[error_type] = (
                    group.sentence_type_counts.get(error_type, 0) + 1
                )
            if labels & FACTUAL_ERROR_TYPES:
                caption_ok = False
            else:
                sentence_factual += 1
                group.sentence_factual += 1
        caption_total += 1
        group.caption_total += 1
        if caption_ok:
            caption_factual += 1
            group.caption_factual += 1
    return ErrorRateReport(
        sentence_total=sentence_total,
        sentence_factual=sentence_factual,
        caption_total=caption_total,
        caption_factual=caption_factual,
        groups=groups,
    )


@dataclass(frozen=True)
class MentionAnnotation:
    """One sentence's audit for a given mention kind.

    ``has_mention`` says the sentence contains such a mention at all;
    ``is_nonfactual`` says the mention contradicts the chart.
    """

    source_model: str
    dataset_origin: str
    error_type: ErrorType
    has_mention: bool
    is_nonfactual: bool


@dataclass(frozen=True)
class MentionErrorRate:
    nonfactual: int
    total: int

    @property
    def percentage(self) -> float | None:
        if self.total == 0:
            return None
        return 100.0 * self.nonfactual / self.total

    def formatted(self) -> str:
        if self.total == 0:
            return "N/A (0/0)"
        return f"{self.percentage:.2f} ({self.nonfactual}/{self.total})"


def mention_error_rate(
    annotations: Sequence[MentionAnnotation],
) -> Mapping[tuple[str, str, ErrorType], MentionErrorRate]:
    """Share of mention-bearing sentences whose mention is non-factual.

    Grouped by (model, dataset, mention kind); groups with no mentions
    at all report a None percentage rather than a zero.
    """
    tallies: dict[tuple[str, str, ErrorType], list[int]] = {}
    for ann in annotations:
        key = (ann.source_model, ann.dataset_origin, ann.error_type)
        pair = tallies.setdefault(key, [0, 0])
        if ann.has_mention:
            pair[1] += 1
            if ann.is_nonfactual:
                pair[0] += 1
    return {
        key: MentionErrorRate(nonfactual=v[0], total=v[1])
        for key, v in tallies.items()
    }
