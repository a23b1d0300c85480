"""Caption correction: explain the errors, then emit a corrected caption.

The rectifier returns free text ending in a marked corrected caption;
the pipeline parses that, guards against echoes and runaway rewrites,
and reports an edit distance.

Run with: python3 demos/05_correction.py
"""

from chartfact.backends import GoldTableBackend, TruthfulRectifier
from chartfact.correction import correct_caption
from chartfact.table import ChartRef, parse_linearized

CHART = ChartRef(
    id="demo",
    gold_table=parse_linearized(
        "Year\tRate&&&2018\t4.0&&&2019\t3.7&&&2020\t8.1", title="Rates"
    ),
)


def show(caption: str) -> None:
    result = correct_caption(CHART, caption, GoldTableBackend(), TruthfulRectifier())
    print(f"status {result.status.value}, edit distance {result.edit_distance}")
    print(f"  in:  {caption}")
    print(f"  out: {result.corrected}")
    if result.explanation:
        print(f"  why: {result.explanation}")
    print()


def main() -> None:
    # A wrong number and a wrong direction get fixed in one pass. The
    # number fix needs an unambiguous row anchor ("2020" here).
    show("The rate fell to 9.9 in 2020.")
    # With two candidate rows mentioned, the number is left alone rather
    # than guessed; only the trend verb is repaired.
    show("The rate fell from 3.7 in 2019 to 9.9 in 2020.")
    # A faithful caption comes back unchanged.
    show("The rate climbed from 3.7 in 2019 to 8.1 in 2020.")


if __name__ == "__main__":
    main()
