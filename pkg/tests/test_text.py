import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from chartfact.table import Table
from chartfact.text import (
    Caption,
    LexiconError,
    SegmentationError,
    TableCellSource,
    TrendLexicon,
    TrendPair,
    TrendTermSource,
    find_trend_terms,
    find_value_mentions,
    segment_sentences,
)

CASES = json.loads(
    (Path(__file__).parent / "data" / "segmentation_cases.json").read_text("utf-8")
)


@pytest.mark.parametrize("case", CASES, ids=lambda c: c["raw"][:40])
def test_segmentation_cases(case):
    got = [s.text for s in segment_sentences(case["raw"])]
    assert got == case["expected"]


def test_segmentation_fixture_is_substantial():
    assert len(CASES) >= 50


def test_segment_rejects_empty():
    with pytest.raises(SegmentationError):
        segment_sentences("")
    with pytest.raises(SegmentationError):
        segment_sentences("   \n ")


def test_sentence_indices_contiguous():
    sentences = segment_sentences("One. Two. Three.")
    assert [s.index for s in sentences] == [0, 1, 2]


def test_caption_from_text_and_from_sentences():
    c = Caption.from_text("Turnout rose. It fell back.")
    assert len(c.sentences) == 2
    d = Caption.from_sentences(["Turnout rose.", "It fell back."])
    assert [s.text for s in d.sentences] == [s.text for s in c.sentences]


def test_caption_rejects_mismatched_sentences():
    from chartfact.text import Sentence

    with pytest.raises(ValueError):
        Caption("Something else entirely.", (Sentence("Turnout rose.", 0),))
    with pytest.raises(ValueError):
        Caption("A. B.", (Sentence("A.", 0), Sentence("B.", 2)))


_caption_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=80
).filter(lambda s: s.strip())


@settings(max_examples=200, deadline=None)
@given(_caption_text)
def test_segmentation_reassembles(raw):
    c = Caption.from_text(raw)
    collapsed = " ".join(raw.split())
    joined = " ".join(" ".join(s.text.split()) for s in c.sentences)
    assert joined == collapsed
    assert [s.index for s in c.sentences] == list(range(len(c.sentences)))


# --- value mentions ---


def table(*rows, header=("Label", "Value")):
    return Table(header=header, rows=rows)


def test_mention_same_start_keeps_longest():
    t = table(("1990", "19"), header=("Year", "Count"))
    mentions = find_value_mentions("In 1990 there were 19 cases.", t)
    spans = {(m.start, m.matched_text) for m in mentions}
    assert (3, "1990") in spans
    assert (19, "19") in spans
    # "19" also occurs at offset 3 inside "1990" but shares its start.
    assert (3, "19") not in {(m.start, m.matched_text) for m in mentions}


def test_mention_contained_with_different_start_is_kept():
    t = table(("Alpha", "15"), ("Beta", "5"))
    mentions = find_value_mentions("Alpha hit 15 in the tally.", t)
    texts = {(m.start, m.matched_text) for m in mentions}
    assert (10, "15") in texts
    assert (11, "5") in texts


def test_mention_source_coordinates():
    t = table(("Alpha", "15"), ("Beta", "5"))
    mentions = find_value_mentions("Beta scored 5.", t)
    by_text = {m.matched_text: m.source for m in mentions}
    assert by_text["Beta"] == TableCellSource(1, 0)
    assert by_text["5"] == TableCellSource(1, 1)


def test_mention_numeric_rendering_variants():
    t = table(("Total", "1,234"))
    got = {m.matched_text for m in find_value_mentions("The total was 1234 overall.", t)}
    assert "1234" in got
    t2 = table(("Total", "1234"))
    got2 = {m.matched_text for m in find_value_mentions("The total was 1,234 overall.", t2)}
    assert "1,234" in got2


def test_mention_all_occurrences_found():
    t = table(("A", "7"))
    mentions = [m for m in find_value_mentions("7 up, 7 down.", t) if m.matched_text == "7"]
    assert [m.start for m in mentions] == [0, 6]


def test_mention_matched_text_equals_span():
    t = table(("Alpha", "15"), ("Beta", "5"))
    text = "Alpha hit 15 in the tally."
    for m in find_value_mentions(text, t):
        assert text[m.start : m.end] == m.matched_text


def test_mentions_sorted_by_position():
    t = table(("Alpha", "3"), ("Beta", "9"))
    mentions = find_value_mentions("Beta had 9 while Alpha had 3.", t)
    starts = [m.start for m in mentions]
    assert starts == sorted(starts)


def test_whitespace_cell_never_matches():
    t = table((" ", "5"))
    mentions = find_value_mentions("A 5 here.", t)
    assert all(m.matched_text.strip() for m in mentions)


# --- trend lexicon ---


@pytest.fixture(scope="module")
def lexicon():
    return TrendLexicon.default()


def test_default_lexicon_loads(lexicon):
    assert len(lexicon.pairs) >= 10


@pytest.mark.parametrize(
    "surface,antonym",
    [
        ("rose", "fell"),
        ("fell", "rose"),
        ("increased", "decreased"),
        ("increasing", "decreasing"),
        ("increases", "decreases"),
        ("climbed", "dropped"),
        ("dropped", "climbed"),
        ("grew", "shrank"),
        ("worsened", "improved"),
        ("declined", "gained"),
        ("rises", "falls"),
        ("grows", "shrinks"),
    ],
)
def test_antonym_surface_carries_inflection(surface, antonym):
    assert TrendLexicon.default().antonym_surface(surface) == antonym


def test_antonym_surface_carries_case(lexicon):
    assert lexicon.antonym_surface("Increased") == "Decreased"
    assert lexicon.antonym_surface("ROSE") == "FELL"


def test_antonym_unknown_raises(lexicon):
    with pytest.raises(LexiconError):
        lexicon.antonym_surface("wobbled")


def test_lookup_and_polarity(lexicon):
    info = lexicon.lookup("falling")
    assert info is not None
    _, is_up, kind = info
    assert is_up is False
    assert kind == "ing"
    assert lexicon.lookup("banana") is None
    assert lexicon.is_upward("rise") is True
    assert lexicon.is_upward("fall") is False
    with pytest.raises(LexiconError):
        lexicon.is_upward("sideways")


def test_find_trend_terms_positions(lexicon):
    matches = find_trend_terms("Rates rose then fell sharply.", lexicon)
    got = [(m.matched_text, m.source.polarity) for m in matches]
    assert got == [("rose", "rose"), ("fell", "fell")]
    for m in matches:
        assert isinstance(m.source, TrendTermSource)


def test_find_trend_terms_word_boundaries(lexicon):
    assert find_trend_terms("The mushroom gross margin.", lexicon) == []
    assert len(find_trend_terms("It is growing.", lexicon)) == 1


def test_trend_terms_case_insensitive(lexicon):
    matches = find_trend_terms("INCREASED demand, Falling supply.", lexicon)
    assert {m.matched_text for m in matches} == {"INCREASED", "Falling"}


def test_trend_pair_validation():
    with pytest.raises(LexiconError):
        TrendPair("Up", "down")
    with pytest.raises(LexiconError):
        TrendPair("same", "same")
    with pytest.raises(LexiconError):
        TrendPair("one two three four", "down")
    with pytest.raises(LexiconError):
        TrendPair("", "down")


def test_lexicon_rejects_duplicate_terms():
    with pytest.raises(LexiconError):
        TrendLexicon([TrendPair("rise", "fall"), TrendPair("rise", "drop")])


def test_lexicon_parse_errors():
    with pytest.raises(LexiconError):
        TrendLexicon._parse("rise fall\n")
    with pytest.raises(LexiconError):
        TrendLexicon._parse("# only a comment\n")


def test_lexicon_file_round_trip(tmp_path):
    path = tmp_path / "lex.txt"
    path.write_text("# pairs\nsoar\tplunge\n", encoding="utf-8")
    lx = TrendLexicon.from_file(path)
    assert lx.antonym_surface("soared") == "plunged"
    assert lx.is_upward("soar")


def test_multiword_terms_match_base_only():
    lx = TrendLexicon([TrendPair("go up", "go down")])
    matches = find_trend_terms("Rates go up each year.", lx)
    assert [m.matched_text for m in matches] == ["go up"]
