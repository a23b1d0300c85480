"""Contrastive data generation: corrupt true sentences three ways.

Each true sentence can spawn a value swap, a trend flip, and an
out-of-context pull from another chart. Everything is seed-deterministic.

Run with: python3 demos/03_negatives.py
"""

from chartfact.negatives import CorpusChart, GenerationConfig, generate_all
from chartfact.table import ChartRef, parse_linearized


def chart(cid: str, wire: str, sentences: tuple[str, ...]) -> CorpusChart:
    ref = ChartRef(id=cid, gold_table=parse_linearized(wire))
    return CorpusChart(chart=ref, sentences=sentences)


CORPUS = [
    chart(
        "demo-a",
        "Year\tRate&&&2018\t4.0&&&2019\t3.7&&&2020\t8.1",
        ("The rate climbed from 3.7 in 2019 to 8.1 in 2020.",),
    ),
    chart(
        "demo-b",
        "Country\tShare&&&France\t31&&&Spain\t24&&&Italy\t18",
        ("France led with a 31 share while Italy trailed at 18.",),
    ),
]


def main() -> None:
    instances = generate_all(CORPUS, rng_seed=7, config=GenerationConfig(max_per_sentence=2))
    for inst in instances:
        print(f"{inst.chart_id}  {inst.label:<13} {inst.origin}")
        print(f"    {inst.sentence}")
        if inst.origin == "generated:value_label":
            print(f"    (was: {inst.provenance.positive})")
    print()
    rerun = generate_all(CORPUS, rng_seed=7, config=GenerationConfig(max_per_sentence=2))
    assert instances == rerun
    print("same seed, same corpus: identical instances")


if __name__ == "__main__":
    main()
