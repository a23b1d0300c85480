"""Annotated benchmark handling: majority resolution, splits, and stats.

Instances carry raw per-annotator labels. Factuality is resolved by
strict majority (half-half ties count as present) and grammatical
problems alone never make a sentence non-factual.

Run with: python3 demos/07_dataset_stats.py
"""

from chartfact.dataset import AnnotatedInstance, ErrorType, split_stats
from chartfact.metrics import error_rates
from chartfact.table import ChartRef
from chartfact.text import Caption

V = ErrorType.VALUE
G = ErrorType.GRAMMATICAL
CLEAN: frozenset[ErrorType] = frozenset()


def instance(iid: str, model: str, origin: str, labels_per_sentence) -> AnnotatedInstance:
    texts = [f"Sentence {i} of {iid}." for i in range(len(labels_per_sentence))]
    return AnnotatedInstance(
        id=iid,
        source_model=model,
        dataset_origin=origin,
        chart=ChartRef(id=f"chart-{iid}"),
        caption=Caption.from_sentences(texts),
        annotations=tuple(tuple(per_sent) for per_sent in labels_per_sentence),
    )


INSTANCES = [
    # 2 of 3 annotators saw a value error in sentence 1.
    instance(
        "a", "GPT-4V", "pew",
        [
            [CLEAN, CLEAN, CLEAN],
            [frozenset({V}), frozenset({V}), CLEAN],
        ],
    ),
    # Grammatical-only findings leave the caption factual.
    instance("b", "GPT-4V", "vistext", [[frozenset({G}), frozenset({G})]]),
    instance("c", "DePlot + GPT-4", "pew", [[CLEAN, CLEAN]]),
    instance("d", "MatCha", "pew", [[frozenset({V}), frozenset({V})]]),
]


def main() -> None:
    for inst in INSTANCES:
        resolved = [sorted(t.value for t in labels) for labels in inst.resolved_labels]
        print(
            f"{inst.id}: split {inst.split.value}, resolved {resolved}, "
            f"caption factual {inst.caption_factual}"
        )

    stats = split_stats(INSTANCES)
    print("\nper-split counts (sentences factual/nonfactual, captions factual/nonfactual):")
    for split, c in stats.per_split.items():
        print(
            f"  {split.value}: {c.sentence_factual}/{c.sentence_nonfactual}  "
            f"{c.caption_factual}/{c.caption_nonfactual}"
        )
    print(f"total captions: {stats.total.caption_total}")

    report = error_rates(INSTANCES)
    group = report.groups[("GPT-4V", "pew")]
    print(
        f"\nGPT-4V on pew: value-error rate {group.sentence_type_rate(ErrorType.VALUE):.2f}, "
        f"caption factual rate {group.caption_factual_rate:.2f}"
    )


if __name__ == "__main__":
    main()
