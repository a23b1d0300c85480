"""Caption text handling: sentence segmentation and in-sentence mentions.

Captions are split into sentences with deterministic rules (no trained
models), and sentences are scanned for two kinds of mention: table cell
values and directional trend terms from an antonym lexicon.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence, Union

from .table import Table

# Dotted tokens that end with "." but do not end a sentence.  Matched
# case-insensitively against the token preceding the period.
_ABBREVIATIONS = frozenset(
    {
        "e.g", "i.e", "etc", "vs", "cf", "et", "al", "ca", "approx",
        "fig", "figs", "no", "nos", "dr", "mr", "mrs", "ms", "prof",
        "sr", "jr", "st", "inc", "ltd", "co", "corp", "dept", "est",
        "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
        "oct", "nov", "dec",
    }
)

# A token made of single letters separated by periods, e.g. "U.S".
_INITIALS_RE = re.compile(r"(?:\w\.)*\w")

_VOWELS = "aeiou"


class SegmentationError(ValueError):
    pass


class LexiconError(ValueError):
    """Raised for malformed lexicon files or pair sets."""


@dataclass(frozen=True)
class Sentence:
    """One caption sentence with its position in the caption."""

    text: str
    index: int

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("sentence text must be non-empty")
        if self.index < 0:
            raise ValueError("sentence index must be non-negative")


@dataclass(frozen=True)
class Caption:
    """A caption's raw text together with its sentences, in order.

    Joining the sentence texts with single spaces and collapsing runs of
    whitespace must reproduce the raw text with its whitespace collapsed;
    segmentation only ever cuts, it never rewrites.
    """

    raw: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        joined = " ".join(s.text for s in self.sentences)
        if _collapse(joined) != _collapse(self.raw):
            raise ValueError("sentences do not reassemble into the raw caption")
        for i, s in enumerate(self.sentences):
            if s.index != i:
                raise ValueError("sentence indices must be contiguous from 0")

    @classmethod
    def from_text(cls, raw: str) -> "Caption":
        return cls(raw, tuple(segment_sentences(raw)))

    @classmethod
    def from_sentences(cls, texts: Sequence[str]) -> "Caption":
        sentences = tuple(Sentence(t, i) for i, t in enumerate(texts))
        return cls(" ".join(texts), sentences)


def _collapse(text: str) -> str:
    return " ".join(text.split())


def segment_sentences(raw: str) -> list[Sentence]:
    """Split caption text into sentences.

    A ``.``, ``!`` or ``?`` ends a sentence when followed by whitespace and
    an uppercase letter, or by end of text.  Decimal points never qualify
    (no whitespace follows them), runs of dots are ellipses and never
    split, and a period after a known abbreviation or an initialism such
    as "U.S." does not split either.
    """
    if not raw.strip():
        raise SegmentationError("caption text is empty")
    boundaries = []
    n = len(raw)
    for i, ch in enumerate(raw):
        if ch not in ".!?":
            continue
        if i + 1 < n and raw[i + 1] in ".!?":
            continue  # not the end of the punctuation run
        if ch == "." and i > 0 and raw[i - 1] == ".":
            continue  # ellipsis
        j = i + 1
        while j < n and raw[j].isspace():
            j += 1
        if j < n and (j == i + 1 or not raw[j].isupper()):
            continue  # no whitespace gap, or next sentence not capitalized
        if ch == ".":
            token = re.search(r"(\S*)$", raw[:i]).group(1)
            if token.lower() in _ABBREVIATIONS:
                continue
            if token and _INITIALS_RE.fullmatch(token) and len(token) <= 7:
                continue
        boundaries.append(i + 1)
    pieces = []
    start = 0
    for b in boundaries + [n]:
        piece = raw[start:b].strip()
        if piece:
            pieces.append(piece)
        start = b
    return [Sentence(text, i) for i, text in enumerate(pieces)]


@dataclass(frozen=True)
class TrendPair:
    """One antonym pair; ``up`` names the upward direction by convention."""

    up: str
    down: str

    def __post_init__(self):
        for term in (self.up, self.down):
            if not term or term != term.lower() or term.strip() != term:
                raise LexiconError(f"bad lexicon term {term!r}")
            if not 1 <= len(term.split()) <= 3:
                raise LexiconError(f"term {term!r} must be 1 to 3 words")
        if self.up == self.down:
            raise LexiconError(f"pair sides must differ: {self.up!r}")


def _inflections(term: str) -> dict[str, str]:
    """Surface forms of a term keyed to a form kind (base/s/ed/ing).

    Fixed suffix rules only: -s/-es, -ed with e-drop, -ing with e-drop,
    and final-consonant doubling for short words.  Multi-word terms are
    matched in base form only.
    """
    forms = {term: "base"}
    if " " in term:
        return forms
    if term.endswith(("s", "x", "z", "ch", "sh")):
        forms[term + "es"] = "s"
    elif term.endswith("y") and len(term) > 1 and term[-2] not in _VOWELS:
        forms[term[:-1] + "ies"] = "s"
    else:
        forms[term + "s"] = "s"
    doubled = (
        len(term) >= 3
        and len(term) <= 4
        and term[-1] not in _VOWELS + "wxy"
        and term[-2] in _VOWELS
        and term[-3] not in _VOWELS
    )
    if term.endswith("e"):
        forms[term + "d"] = "ed"
    elif term.endswith("y") and len(term) > 1 and term[-2] not in _VOWELS:
        forms[term[:-1] + "ied"] = "ed"
    elif doubled:
        forms[term + term[-1] + "ed"] = "ed"
    else:
        forms[term + "ed"] = "ed"
    if term.endswith("e") and not term.endswith("ee"):
        forms[term[:-1] + "ing"] = "ing"
    elif doubled:
        forms[term + term[-1] + "ing"] = "ing"
    else:
        forms[term + "ing"] = "ing"
    return forms


class TrendLexicon:
    """Antonym pairs of trend terms with inflection-aware matching."""

    def __init__(self, pairs: Iterable[TrendPair]):
        self.pairs = tuple(pairs)
        seen: set[str] = set()
        for pair in self.pairs:
            for term in (pair.up, pair.down):
                if term in seen:
                    raise LexiconError(f"term {term!r} appears in two pairs")
                seen.add(term)
        # form surface -> (pair_index, is_up_side, form_kind)
        self._forms: dict[str, tuple[int, bool, str]] = {}
        for idx, pair in enumerate(self.pairs):
            for side, is_up in ((pair.up, True), (pair.down, False)):
                for surface, kind in _inflections(side).items():
                    self._forms.setdefault(surface, (idx, is_up, kind))
        alternation = "|".join(
            re.escape(f) for f in sorted(self._forms, key=len, reverse=True)
        )
        self._regex = re.compile(rf"\b(?:{alternation})\b", re.IGNORECASE)

    @classmethod
    def from_file(cls, path) -> "TrendLexicon":
        with open(path, encoding="utf-8") as fh:
            return cls._parse(fh.read())

    @classmethod
    def default(cls) -> "TrendLexicon":
        text = resources.files("chartfact.data").joinpath("trend_lexicon.txt").read_text("utf-8")
        return cls._parse(text)

    @classmethod
    def _parse(cls, text: str) -> "TrendLexicon":
        pairs = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split("\t")
            if len(parts) != 2:
                raise LexiconError(
                    f"line {lineno}: expected two tab-separated terms"
                )
            pairs.append(TrendPair(parts[0].strip(), parts[1].strip()))
        if not pairs:
            raise LexiconError("lexicon has no pairs")
        return cls(pairs)

    def lookup(self, surface: str) -> tuple[int, bool, str] | None:
        """Resolve a matched surface form to (pair_index, is_up, form_kind)."""
        return self._forms.get(surface.lower())

    def is_upward(self, polarity: str) -> bool:
        for pair in self.pairs:
            if polarity == pair.up:
                return True
            if polarity == pair.down:
                return False
        raise LexiconError(f"unknown polarity term {polarity!r}")

    def antonym_surface(self, matched_text: str) -> str:
        """The opposite-direction term inflected like the matched text.

        Capitalization carries over: "Increased" inverts to "Decreased".
        """
        info = self.lookup(matched_text)
        if info is None:
            raise LexiconError(f"{matched_text!r} is not a lexicon form")
        pair_index, is_up, kind = info
        pair = self.pairs[pair_index]
        target = pair.down if is_up else pair.up
        for surface, k in _inflections(target).items():
            if k == kind:
                return _match_case(matched_text, surface)
        return _match_case(matched_text, target)


def _match_case(model: str, text: str) -> str:
    if model.isupper() and len(model) > 1:
        return text.upper()
    if model[:1].isupper():
        return text[:1].upper() + text[1:]
    return text


@dataclass(frozen=True)
class TableCellSource:
    """Provenance of a value mention: the cell it came from."""

    row: int
    col: int


@dataclass(frozen=True)
class TrendTermSource:
    """Provenance of a trend mention: its pair and matched polarity term."""

    pair_index: int
    polarity: str
    antonym: str


@dataclass(frozen=True)
class MentionMatch:
    """A located mention inside one sentence.

    ``start``/``end`` are character offsets into the sentence text and
    ``matched_text`` equals the substring at that span.
    """

    start: int
    end: int
    matched_text: str
    source: Union[TableCellSource, TrendTermSource]

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError("mention span is empty or inverted")


def _sentence_text(sentence: Sentence | str) -> str:
    return sentence.text if isinstance(sentence, Sentence) else sentence


def find_value_mentions(sentence: Sentence | str, table: Table) -> list[MentionMatch]:
    """Find occurrences of table cell values in a sentence.

    Each cell matches on its raw text; numeric cells also match their
    canonical rendering and its digit-grouping variant ("1234" for
    "1,234" and the reverse).  When two matches start at the same offset
    the shorter one is dropped, so "1990" wins over "19" there.
    """
    text = _sentence_text(sentence)
    found: set[tuple[int, int, int, int]] = set()
    for r, c, cell in table.cells():
        candidates = {cell.raw}
        if cell.numeric is not None:
            candidates.add(cell.numeric.render())
            candidates.add(cell.numeric.render(group_digits=True))
        for cand in candidates:
            if not cand.strip():
                continue
            pos = text.find(cand)
            while pos != -1:
                found.add((pos, pos + len(cand), r, c))
                pos = text.find(cand, pos + 1)
    longest_at: dict[int, int] = {}
    for s, e, _, _ in found:
        longest_at[s] = max(longest_at.get(s, 0), e)
    kept = [(s, e, r, c) for (s, e, r, c) in found if e == longest_at[s]]
    kept.sort()
    return [
        MentionMatch(s, e, text[s:e], TableCellSource(r, c)) for s, e, r, c in kept
    ]


def find_trend_terms(sentence: Sentence | str, lexicon: TrendLexicon) -> list[MentionMatch]:
    """Find trend-term mentions; spans are disjoint, longest form first."""
    text = _sentence_text(sentence)
    out = []
    for m in lexicon._regex.finditer(text):
        info = lexicon.lookup(m.group(0))
        if info is None:
            continue
        pair_index, is_up, _ = info
        pair = lexicon.pairs[pair_index]
        polarity = pair.up if is_up else pair.down
        antonym = pair.down if is_up else pair.up
        out.append(
            MentionMatch(
                m.start(),
                m.end(),
                m.group(0),
                TrendTermSource(pair_index, polarity, antonym),
            )
        )
    return out
