import pytest

from chartfact.backends import GoldTableBackend, TruthfulRectifier
from chartfact.correction import (
    MARKER,
    NO_ERRORS_LINE,
    BatchOutcome,
    CorrectionResult,
    CorrectionStatus,
    MissingMarkerError,
    TemplateError,
    batch_correct,
    correct_caption,
    default_template,
    parse_rectifier_response,
    render_rectification_prompt,
)
from chartfact.metrics import levenshtein
from chartfact.table import ChartRef, parse_linearized
from chartfact.text import Caption

TABLE = parse_linearized(
    "Year\tRate&&&1990\t20.4&&&2000\t26.7", title="Rates over time"
)
CHART = ChartRef(id="c1", gold_table=TABLE)
GOLD = GoldTableBackend()


class StaticRectifier:
    """Returns one canned response regardless of input."""

    concurrency_safe = True

    def __init__(self, response, backend_id="static"):
        self.response = response
        self.backend_id = backend_id

    def rectify(self, title, table, caption):
        return self.response


class ExplodingRectifier:
    backend_id = "exploding"
    concurrency_safe = True

    def rectify(self, title, table, caption):
        raise ValueError("boom")


def test_default_template_has_all_placeholders():
    tpl = default_template()
    for ph in ("{TITLE}", "{TABLE}", "{CAPTION}"):
        assert ph in tpl


def test_render_fills_placeholders():
    tpl = "T={TITLE}\nD={TABLE}\nC={CAPTION}"
    out = render_rectification_prompt("My chart", TABLE, "A caption.", tpl)
    assert out == (
        "T=My chart\nD=Year\tRate&&&1990\t20.4&&&2000\t26.7\nC=A caption."
    )


def test_render_rejects_incomplete_template():
    with pytest.raises(TemplateError):
        render_rectification_prompt("t", TABLE, "c", "only {TITLE} and {TABLE}")


def test_parse_takes_last_marker():
    raw = f"note about {MARKER} usage\nmore\n{MARKER}\nFixed text."
    explanation, corrected, no_errors = parse_rectifier_response(raw)
    assert corrected == "Fixed text."
    assert explanation.startswith("note about")
    assert not no_errors


def test_parse_no_errors_needs_own_line():
    raw = f"{NO_ERRORS_LINE}\n{MARKER}\nSame text."
    assert parse_rectifier_response(raw)[2] is True
    embedded = f"There are NO ERRORS here at all\n{MARKER}\nSame text."
    assert parse_rectifier_response(embedded)[2] is False


def test_parse_missing_marker_raises():
    with pytest.raises(MissingMarkerError):
        parse_rectifier_response("I could not find anything to fix.")


def test_correct_caption_applies_fix():
    rectifier = StaticRectifier(
        f"- 99.9 is unsupported\n{MARKER}\nThe rate was 26.7 in 2000."
    )
    result = correct_caption(CHART, "The rate was 99.9 in 2000.", GOLD, rectifier)
    assert result.status is CorrectionStatus.CORRECTED
    assert result.corrected == "The rate was 26.7 in 2000."
    assert result.edit_distance == levenshtein(
        "The rate was 99.9 in 2000.", result.corrected
    )
    assert result.table_used == TABLE


def test_correct_caption_no_errors_keeps_original():
    rectifier = StaticRectifier(f"{NO_ERRORS_LINE}\n{MARKER}\nIgnored rewrite.")
    result = correct_caption(CHART, "The rate was 20.4 in 1990.", GOLD, rectifier)
    assert result.status is CorrectionStatus.UNCHANGED
    assert result.corrected == "The rate was 20.4 in 1990."
    assert result.edit_distance == 0


def test_correct_caption_echo_counts_as_unchanged():
    rectifier = StaticRectifier(f"Looks fine overall.\n{MARKER}\nSame words.")
    result = correct_caption(CHART, "Same words.", GOLD, rectifier)
    assert result.status is CorrectionStatus.UNCHANGED


def test_correct_caption_parse_fallback():
    rectifier = StaticRectifier("model rambled with no marker at all")
    result = correct_caption(CHART, "The rate was 99.9 in 2000.", GOLD, rectifier)
    assert result.status is CorrectionStatus.PARSE_FALLBACK
    assert result.corrected == "The rate was 99.9 in 2000."
    assert result.edit_distance == 0
    assert result.explanation == "model rambled with no marker at all"


def test_correct_caption_edit_ratio_downgrade():
    rectifier = StaticRectifier(
        f"- rewrote everything\n{MARKER}\nA totally different sentence about nothing."
    )
    caption = "The rate was 99.9 in 2000."
    kept = correct_caption(CHART, caption, GOLD, rectifier, max_edit_ratio=0.2)
    assert kept.status is CorrectionStatus.UNCHANGED
    assert kept.corrected == caption
    free = correct_caption(CHART, caption, GOLD, rectifier)
    assert free.status is CorrectionStatus.CORRECTED


def test_truthful_rectifier_fixes_then_stabilizes():
    caption = "The rate fell to 99.9 in 2000."
    first = correct_caption(CHART, caption, GOLD, TruthfulRectifier())
    assert first.status is CorrectionStatus.CORRECTED
    assert first.corrected == "The rate rose to 26.7 in 2000."
    second = correct_caption(CHART, first.corrected, GOLD, TruthfulRectifier())
    assert second.status is CorrectionStatus.UNCHANGED
    assert second.edit_distance == 0


def test_truthful_rectifier_declares_no_errors():
    response = TruthfulRectifier().rectify(
        "t", TABLE, "The rate rose from 20.4 in 1990 to 26.7 in 2000."
    )
    explanation, corrected, no_errors = parse_rectifier_response(response)
    assert no_errors
    assert corrected == "The rate rose from 20.4 in 1990 to 26.7 in 2000."


def test_correction_result_guards_unchanged_consistency():
    cap = Caption.from_text("A caption.")
    with pytest.raises(ValueError):
        CorrectionResult(
            original=cap,
            corrected="Something else.",
            explanation="",
            edit_distance=0,
            table_used=TABLE,
            status=CorrectionStatus.UNCHANGED,
        )


def test_correction_result_guards_edit_distance():
    cap = Caption.from_text("A caption.")
    with pytest.raises(ValueError):
        CorrectionResult(
            original=cap,
            corrected="A caption!",
            explanation="",
            edit_distance=5,
            table_used=TABLE,
            status=CorrectionStatus.CORRECTED,
        )


def test_batch_preserves_order_and_isolates_failures():
    items = [
        (CHART, "The rate fell to 99.9 in 2000."),
        (CHART, ""),
        (CHART, "The rate rose from 20.4 in 1990 to 26.7 in 2000."),
    ]
    outcomes = batch_correct(items, GOLD, TruthfulRectifier())
    assert [o.index for o in outcomes] == [0, 1, 2]
    assert outcomes[0].result.status is CorrectionStatus.CORRECTED
    assert outcomes[1].result is None and outcomes[1].error
    assert outcomes[2].result.status is CorrectionStatus.UNCHANGED


def test_batch_serial_backend_still_completes():
    class SerialRectifier(TruthfulRectifier):
        pass

    rectifier = SerialRectifier()
    object.__setattr__(rectifier, "concurrency_safe", False)
    items = [(CHART, f"The rate fell to 9{i}.9 in 2000.") for i in range(5)]
    outcomes = batch_correct(items, GOLD, rectifier, concurrency_limit=4)
    assert all(o.result.status is CorrectionStatus.CORRECTED for o in outcomes)


def test_batch_rejects_bad_limit():
    with pytest.raises(ValueError):
        batch_correct([], GOLD, TruthfulRectifier(), concurrency_limit=0)


def test_batch_wraps_backend_valueerrors():
    outcomes = batch_correct([(CHART, "x.")], GOLD, ExplodingRectifier())
    assert outcomes == [BatchOutcome(index=0, result=None, error="boom")]
