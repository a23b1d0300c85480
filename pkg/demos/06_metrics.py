"""Evaluation metrics: edit distance, rank agreement, AUC, table match,
and annotator agreement.

Run with: python3 demos/06_metrics.py
"""

from chartfact.metrics import (
    fleiss_kappa,
    kendall_tau,
    levenshtein,
    majority_agreement,
    normalized_levenshtein,
    rms_f1,
    roc_auc,
)
from chartfact.table import parse_linearized


def main() -> None:
    print("levenshtein('kitten', 'sitting') =", levenshtein("kitten", "sitting"))
    print(
        "normalized_levenshtein same pair =",
        round(normalized_levenshtein("kitten", "sitting"), 4),
    )

    model_scores = [0.9, 0.2, 0.7, 0.4]
    human_scores = [1.0, 0.0, 1.0, 0.5]
    print("\nkendall tau-b (model vs human) =", round(kendall_tau(model_scores, human_scores), 4))

    labels = [1, 0, 1, 0]
    print("roc auc (scores vs labels) =", roc_auc(model_scores, labels))

    gold = parse_linearized("Label\tValue&&&a\t1&&&b\t2&&&c\t3&&&d\t4")
    pred = parse_linearized("Label\tValue&&&a\t1&&&b\t2&&&c\t30")
    print("\ntable reconstruction rms_f1 =", round(rms_f1(pred, gold), 4))

    # Rows are items, columns are categories, cells count annotator votes.
    ratings = [[3, 0], [0, 3], [2, 1], [1, 2]]
    print("\nfleiss kappa =", round(fleiss_kappa(ratings), 4))
    print("strict-majority agreement % =", majority_agreement(ratings))


if __name__ == "__main__":
    main()
