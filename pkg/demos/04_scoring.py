"""Factuality scoring: per-sentence entailment, min-pooled per caption.

The oracle backend judges sentences against the gold table, so a single
corrupted number or flipped trend verb drags the caption score down.

Run with: python3 demos/04_scoring.py
"""

from chartfact.backends import make_entail_backend
from chartfact.entailment import score_caption
from chartfact.table import ChartRef, parse_linearized
from chartfact.text import Caption

CHART = ChartRef(
    id="demo",
    gold_table=parse_linearized(
        "Year\tRate&&&2018\t4.0&&&2019\t3.7&&&2020\t8.1", title="Rates"
    ),
)

CAPTIONS = [
    "The rate climbed from 3.7 in 2019 to 8.1 in 2020.",
    "The rate climbed from 3.7 in 2019 to 9.9 in 2020.",
    "The rate fell from 3.7 in 2019 to 8.1 in 2020. It reached 8.1 that year.",
]


def main() -> None:
    backend = make_entail_backend("oracle")
    for raw in CAPTIONS:
        report = score_caption(CHART, Caption.from_text(raw), backend)
        per = ", ".join(f"s{i}={score:.3f}" for i, score in report.per_sentence)
        print(f"caption score {report.caption_score:.3f}  ({per})")
        print(f"    {raw}")


if __name__ == "__main__":
    main()
