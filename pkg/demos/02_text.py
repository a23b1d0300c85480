"""Caption text analysis: sentence segmentation and mention spotting.

Run with: python3 demos/02_text.py
"""

from chartfact.table import parse_linearized
from chartfact.text import Caption, TrendLexicon, find_trend_terms, find_value_mentions

CAPTION = (
    "The U.S. rate fell from 8.1% in 2020 to 5.4% in 2021. "
    "Analysts expect rates to keep declining. Dr. Smith disagrees."
)

TABLE = parse_linearized(
    "Year\tUnemployment rate&&&2019\t3.7%&&&2020\t8.1%&&&2021\t5.4%"
)


def main() -> None:
    caption = Caption.from_text(CAPTION)
    print(f"{len(caption.sentences)} sentences:")
    for s in caption.sentences:
        # Abbreviations like "U.S." and "Dr." do not end sentences.
        print(f"  [{s.index}] {s.text}")

    print("\ntable-value mentions in sentence 0:")
    for m in find_value_mentions(caption.sentences[0], TABLE):
        print(f"  {m.matched_text!r} at {m.start}:{m.end} from cell {m.source}")

    lexicon = TrendLexicon.default()
    print("\ntrend terms across the caption:")
    for s in caption.sentences:
        for m in find_trend_terms(s, lexicon):
            flipped = lexicon.antonym_surface(m.matched_text)
            print(f"  [{s.index}] {m.matched_text!r} inverts to {flipped!r}")


if __name__ == "__main__":
    main()
