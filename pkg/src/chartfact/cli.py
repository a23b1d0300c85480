"""Command-line front end.

Every subcommand takes its options from three layers: built-in defaults,
then a flat ``key=value`` config file (``--config``), then explicit
flags.  ``--dry-run`` prints the fully resolved plan as JSON and stops
before any work.  Runs that produce an output file also write a
``<output>.config.json`` sidecar with the resolved configuration, so a
result can always be tied to the exact settings that made it.  Outputs
carry no timestamps: the same inputs and settings give byte-identical
files.

Exit codes: 0 success, 2 validation failure, 3 backend failure,
4 partial batch (some items failed, the rest were written).  Failures
are reported as one JSON record per line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from . import __version__
from .backends import (
    make_chart2table_backend,
    make_entail_backend,
    make_rectifier_backend,
)
from .dataset import (
    FACTUAL_ERROR_TYPES,
    Split,
    load_chocolate_release,
    load_dataset,
    split_stats,
)
from .entailment import score_caption
from .metrics import (
    DegenerateAgreementError,
    DegenerateSeriesError,
    SingleClassError,
    fleiss_kappa,
    kendall_tau,
    majority_agreement,
    rms_f1,
    roc_auc,
)
from .negatives import (
    GenerationConfig,
    InsufficientCorpusError,
    generate_all,
    read_corpus,
    write_instances,
)
from .correction import batch_correct
from .table import parse_linearized, serialize_linearized
from .text import Caption
from .wire import BackendError, BackendUnavailableError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BACKEND = 3
EXIT_PARTIAL = 4


class CliError(Exception):
    def __init__(self, exit_code: int, category: str, message: str):
        super().__init__(message)
        self.exit_code = exit_code
        self.category = category


def _emit_error(category: str, message: str, **extra: Any) -> None:
    record = {"error": category, "message": message}
    record.update(extra)
    print(json.dumps(record, ensure_ascii=False), file=sys.stderr)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_csv(text: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    if not parts:
        raise ValueError("expected a comma-separated list")
    return parts


def _parse_ratio(text: str) -> tuple[int, int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("split ratio needs exactly three integers")
    return tuple(int(p) for p in parts)  # type: ignore[return-value]


@dataclass(frozen=True)
class _Opt:
    flag: str
    convert: Callable[[str], Any]
    default: Any = None
    required: bool = False
    help: str = ""

    @property
    def dest(self) -> str:
        return self.flag.lstrip("-").replace("-", "_")


_COMMANDS: dict[str, tuple[str, list[_Opt]]] = {
    "gen-negatives": (
        "Generate negative entailment pairs from a chart corpus.",
        [
            _Opt("--corpus", str, required=True, help="chart corpus JSONL"),
            _Opt("--out", str, required=True, help="output instances JSONL"),
            _Opt("--seed", int, default=0, help="master RNG seed"),
            _Opt(
                "--families",
                _parse_csv,
                default=("value_label", "trend", "ooc"),
                help="negative families to generate",
            ),
            _Opt("--max-per-sentence", int, default=2),
            _Opt("--split-ratio", _parse_ratio, default=(522, 36, 37)),
        ],
    ),
    "score": (
        "Score captions against charts with an entailment backend.",
        [
            _Opt("--charts", str, required=True, help="chart corpus JSONL"),
            _Opt("--input", str, required=True, help="JSONL of {chart_id, caption}"),
            _Opt("--out", str, required=True, help="output scores JSONL"),
            _Opt(
                "--backend",
                str,
                default="oracle",
                help="oracle | fixture:<dir> | remote:<base-url>",
            ),
        ],
    ),
    "correct": (
        "Run two-stage caption correction.",
        [
            _Opt("--charts", str, required=True, help="chart corpus JSONL"),
            _Opt("--input", str, required=True, help="JSONL of {chart_id, caption}"),
            _Opt("--out", str, required=True, help="output corrections JSONL"),
            _Opt("--chart2table", str, default="gold"),
            _Opt("--rectifier", str, default="truthful"),
            _Opt("--max-edit-ratio", float, default=None),
            _Opt("--concurrency", int, default=4),
        ],
    ),
    "evaluate": (
        "Join scores (and optional corrections) with an annotated dataset.",
        [
            _Opt("--dataset", str, required=True, help="annotated dataset JSONL"),
            _Opt("--scores", str, required=True, help="scores JSONL from `score`"),
            _Opt("--corrections", str, default=None),
            _Opt("--out", str, required=True, help="output report JSON"),
        ],
    ),
    "meta-eval": (
        "Rank-correlate metric scores with human factuality judgments.",
        [
            _Opt("--dataset", str, required=True),
            _Opt("--scores", str, required=True),
            _Opt("--out", str, required=True),
        ],
    ),
    "stats": (
        "Dataset statistics: counts per split, agreement measures.",
        [
            _Opt("--dataset", str, default=None, help="native dataset JSONL"),
            _Opt("--release", str, default=None, help="released benchmark layout"),
            _Opt("--out", str, required=True, help="output report JSON"),
            _Opt("--csv", str, default=None, help="optional per-split CSV export"),
        ],
    ),
    "table-eval": (
        "Score predicted tables against gold tables.",
        [
            _Opt("--pred", str, required=True, help="JSONL of {id, table_linearized}"),
            _Opt("--gold", str, required=True, help="JSONL of {id, table_linearized}"),
            _Opt("--out", str, required=True, help="output report JSON"),
        ],
    ),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_VALIDATION, "validation", message)


def build_parser() -> _Parser:
    parser = _Parser(prog="chartfact", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (help_text, opts) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.register("type", None, str)
        for opt in opts:
            p.add_argument(
                opt.flag,
                dest=opt.dest,
                type=str,
                default=argparse.SUPPRESS,
                help=opt.help,
            )
        p.add_argument("--config", default=argparse.SUPPRESS, help="key=value file")
        p.add_argument(
            "--dry-run",
            action="store_true",
            default=argparse.SUPPRESS,
            help="print the resolved plan and exit",
        )
    return parser


def _read_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                if "=" not in stripped:
                    raise CliError(
                        EXIT_VALIDATION,
                        "validation",
                        f"{path}:{lineno}: expected key=value",
                    )
                key, _, value = stripped.partition("=")
                out[key.strip()] = value.strip()
    except OSError as exc:
        raise CliError(EXIT_VALIDATION, "validation", f"cannot read config: {exc}")
    return out


def resolve_config(command: str, namespace: argparse.Namespace) -> dict[str, Any]:
    """Layer defaults, config file, and explicit flags for one command."""
    opts = {opt.dest: opt for opt in _COMMANDS[command][1]}
    resolved: dict[str, Any] = {d: o.default for d, o in opts.items()}
    explicit = {k: v for k, v in vars(namespace).items() if k != "command"}
    config_path = explicit.pop("config", None)
    dry_run = explicit.pop("dry_run", False)
    if config_path is not None:
        for key, raw in _read_config_file(config_path).items():
            if key not in opts:
                raise CliError(
                    EXIT_VALIDATION, "validation", f"unknown config key {key!r}"
                )
            try:
                resolved[key] = opts[key].convert(raw)
            except (ValueError, TypeError) as exc:
                raise CliError(EXIT_VALIDATION, "validation", f"config {key}: {exc}")
    for key, raw in explicit.items():
        try:
            resolved[key] = opts[key].convert(raw)
        except (ValueError, TypeError) as exc:
            raise CliError(EXIT_VALIDATION, "validation", f"--{key}: {exc}")
    for dest, opt in opts.items():
        if opt.required and resolved[dest] is None:
            raise CliError(
                EXIT_VALIDATION, "validation", f"missing required option {opt.flag}"
            )
    resolved["dry_run"] = bool(dry_run)
    return resolved


def _jsonable(value: Any) -> Any:
    if isinstance(value, tuple):
        return list(value)
    return value


def _plan(command: str, cfg: dict[str, Any]) -> dict[str, Any]:
    shown = {k: _jsonable(v) for k, v in cfg.items() if k != "dry_run"}
    return {"command": command, "config": shown}


def _write_sidecar(out_path: str, command: str, cfg: dict[str, Any]) -> None:
    body = json.dumps(_plan(command, cfg), sort_keys=True, indent=2, ensure_ascii=False)
    with open(out_path + ".config.json", "w", encoding="utf-8") as fh:
        fh.write(body + "\n")


def _write_json_report(path: str, report: dict[str, Any]) -> None:
    body = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(body + "\n")


def _read_jsonl(path: str, required: Sequence[str]) -> list[dict[str, Any]]:
    records = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CliError(
                        EXIT_VALIDATION, "validation", f"{path}:{lineno}: {exc}"
                    )
                if not isinstance(rec, dict):
                    raise CliError(
                        EXIT_VALIDATION, "validation", f"{path}:{lineno}: not an object"
                    )
                for key in required:
                    if key not in rec:
                        raise CliError(
                            EXIT_VALIDATION,
                            "validation",
                            f"{path}:{lineno}: missing field {key!r}",
                        )
                records.append(rec)
    except OSError as exc:
        raise CliError(EXIT_VALIDATION, "validation", f"cannot read {path}: {exc}")
    return records


def _load_charts(path: str) -> dict[str, Any]:
    try:
        corpus = read_corpus(path)
    except (OSError, ValueError) as exc:
        raise CliError(EXIT_VALIDATION, "validation", str(exc))
    return {c.chart.id: c.chart for c in corpus}


def _batch_exit(n_ok: int, n_backend_failed: int, n_other_failed: int) -> int:
    failed = n_backend_failed + n_other_failed
    if failed == 0:
        return EXIT_OK
    if n_ok == 0 and n_other_failed == 0:
        return EXIT_BACKEND
    return EXIT_PARTIAL


def cmd_gen_negatives(cfg: dict[str, Any]) -> int:
    try:
        corpus = read_corpus(cfg["corpus"])
    except (OSError, ValueError) as exc:
        raise CliError(EXIT_VALIDATION, "validation", str(exc))
    try:
        gen_cfg = GenerationConfig(
            families=tuple(cfg["families"]),
            max_per_sentence=cfg["max_per_sentence"],
            split_ratio=tuple(cfg["split_ratio"]),
        )
        instances = generate_all(corpus, rng_seed=cfg["seed"], config=gen_cfg)
    except (InsufficientCorpusError, ValueError) as exc:
        raise CliError(EXIT_VALIDATION, "validation", str(exc))
    with open(cfg["out"], "w", encoding="utf-8") as fh:
        write_instances(instances, fh)
    _write_sidecar(cfg["out"], "gen-negatives", cfg)
    return EXIT_OK


def cmd_score(cfg: dict[str, Any]) -> int:
    charts = _load_charts(cfg["charts"])
    records = _read_jsonl(cfg["input"], required=("chart_id", "caption"))
    for rec in records:
        if rec["chart_id"] not in charts:
            raise CliError(
                EXIT_VALIDATION, "validation", f"unknown chart_id {rec['chart_id']!r}"
            )
    try:
        backend = make_entail_backend(cfg["backend"])
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, "validation", str(exc))
    cache: dict[str, Any] = {}
    lines: list[str] = []
    n_backend_failed = n_other_failed = 0
    for i, rec in enumerate(records):
        chart = charts[rec["chart_id"]]
        try:
            caption = Caption.from_text(str(rec["caption"]))
            report = score_caption(chart, caption, backend, cache=cache)
        except (BackendUnavailableError, BackendError) as exc:
            n_backend_failed += 1
            _emit_error("backend", str(exc), item=i, chart_id=rec["chart_id"])
            continue
        except ValueError as exc:
            n_other_failed += 1
            _emit_error("validation", str(exc), item=i, chart_id=rec["chart_id"])
            continue
        lines.append(
            json.dumps(
                {
                    "chart_id": rec["chart_id"],
                    "caption": rec["caption"],
                    "sentence_scores": [
                        [idx, score] for idx, score in report.per_sentence
                    ],
                    "caption_score": report.caption_score,
                    "backend": report.backend_id,
                },
                ensure_ascii=False,
            )
        )
    with open(cfg["out"], "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")
    _write_sidecar(cfg["out"], "score", cfg)
    return _batch_exit(len(lines), n_backend_failed, n_other_failed)


def cmd_correct(cfg: dict[str, Any]) -> int:
    charts = _load_charts(cfg["charts"])
    records = _read_jsonl(cfg["input"], required=("chart_id", "caption"))
    for rec in records:
        if rec["chart_id"] not in charts:
            raise CliError(
                EXIT_VALIDATION, "validation", f"unknown chart_id {rec['chart_id']!r}"
            )
    try:
        c2t = make_chart2table_backend(cfg["chart2table"])
        rectifier = make_rectifier_backend(cfg["rectifier"])
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, "validation", str(exc))
    items = [(charts[r["chart_id"]], str(r["caption"])) for r in records]
    outcomes = batch_correct(
        items,
        c2t,
        rectifier,
        concurrency_limit=cfg["concurrency"],
        max_edit_ratio=cfg["max_edit_ratio"],
    )
    lines: list[str] = []
    n_backend_failed = n_other_failed = 0
    for rec, outcome in zip(records, outcomes):
        if outcome.error is not None:
            n_backend_failed += 1
            _emit_error(
                "backend", outcome.error, item=outcome.index, chart_id=rec["chart_id"]
            )
            continue
        result = outcome.result
        lines.append(
            json.dumps(
                {
                    "chart_id": rec["chart_id"],
                    "status": result.status.value,
                    "original": result.original.raw,
                    "corrected": result.corrected,
                    "explanation": result.explanation,
                    "edit_distance": result.edit_distance,
                    "title": result.table_used.title or "",
                    "table_used": serialize_linearized(result.table_used),
                },
                ensure_ascii=False,
            )
        )
    with open(cfg["out"], "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")
    _write_sidecar(cfg["out"], "correct", cfg)
    return _batch_exit(len(lines), n_backend_failed, n_other_failed)


def _load_annotated(path: str | None, release: str | None = None):
    try:
        if release is not None:
            return load_chocolate_release(release)
        return load_dataset(path)
    except (OSError, ValueError) as exc:
        raise CliError(EXIT_VALIDATION, "validation", str(exc))


def _join_scores(instances, scores_path: str) -> list[tuple[Any, float]]:
    by_id = {inst.id: inst for inst in instances}
    joined = []
    for rec in _read_jsonl(scores_path, required=("chart_id", "caption_score")):
        inst = by_id.get(rec["chart_id"])
        if inst is None:
            raise CliError(
                EXIT_VALIDATION,
                "validation",
                f"scores refer to unknown instance {rec['chart_id']!r}",
            )
        joined.append((inst, float(rec["caption_score"])))
    if not joined:
        raise CliError(EXIT_VALIDATION, "validation", "no scores to evaluate")
    return joined


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def cmd_evaluate(cfg: dict[str, Any]) -> int:
    instances = _load_annotated(cfg["dataset"])
    joined = _join_scores(instances, cfg["scores"])
    corrections = None
    if cfg["corrections"] is not None:
        corrections = _read_jsonl(
            cfg["corrections"], required=("chart_id", "status", "edit_distance")
        )
        if not corrections:
            raise CliError(EXIT_VALIDATION, "validation", "no corrections to evaluate")
        known = {inst.id for inst in instances}
        for rec in corrections:
            if rec["chart_id"] not in known:
                raise CliError(
                    EXIT_VALIDATION,
                    "validation",
                    f"corrections refer to unknown instance {rec['chart_id']!r}",
                )
    report: dict[str, Any] = {"splits": {}, "overall": {}}

    def summarize(rows: list[tuple[Any, float]]) -> dict[str, Any]:
        return {
            "n": len(rows),
            "mean_caption_score": _mean([s for _, s in rows]),
            "mean_human_factual": _mean(
                [1.0 if inst.caption_factual else 0.0 for inst, _ in rows]
            ),
        }

    for split in Split:
        rows = [(inst, s) for inst, s in joined if inst.split == split]
        if rows:
            report["splits"][split.value] = summarize(rows)
    report["overall"] = summarize(joined)
    if corrections is not None:
        by_split_ed: dict[str, list[int]] = {}
        status_counts: dict[str, int] = {}
        inst_by_id = {inst.id: inst for inst in instances}
        for rec in corrections:
            split = inst_by_id[rec["chart_id"]].split.value
            by_split_ed.setdefault(split, []).append(int(rec["edit_distance"]))
            status_counts[rec["status"]] = status_counts.get(rec["status"], 0) + 1
        all_ed = [e for eds in by_split_ed.values() for e in eds]
        report["corrections"] = {
            "n": len(all_ed),
            "mean_edit_distance": _mean([float(e) for e in all_ed]),
            "status_counts": dict(sorted(status_counts.items())),
            "mean_edit_distance_by_split": {
                k: _mean([float(e) for e in v])
                for k, v in sorted(by_split_ed.items())
            },
        }
    _write_json_report(cfg["out"], report)
    _write_sidecar(cfg["out"], "evaluate", cfg)
    return EXIT_OK


def cmd_meta_eval(cfg: dict[str, Any]) -> int:
    instances = _load_annotated(cfg["dataset"])
    joined = _join_scores(instances, cfg["scores"])

    def block(rows: list[tuple[Any, float]]) -> dict[str, Any]:
        metric = [s for _, s in rows]
        human_frac = [
            sum(inst.sentence_factuality) / len(inst.sentence_factuality)
            for inst, _ in rows
        ]
        labels = [1 if inst.caption_factual else 0 for inst, _ in rows]
        try:
            tau = kendall_tau(metric, human_frac)
        except (DegenerateSeriesError, ValueError):
            tau = None
        try:
            auc = roc_auc(metric, labels)
        except (SingleClassError, ValueError):
            auc = None
        return {"n": len(rows), "kendall_tau": tau, "roc_auc": auc}

    report: dict[str, Any] = {"splits": {}}
    for split in Split:
        rows = [(inst, s) for inst, s in joined if inst.split == split]
        if rows:
            report["splits"][split.value] = block(rows)
    report["overall"] = block(joined)
    _write_json_report(cfg["out"], report)
    _write_sidecar(cfg["out"], "meta-eval", cfg)
    return EXIT_OK


def _counts_block(counts) -> dict[str, Any]:
    return {
        "sentences": {
            "factual": counts.sentence_factual,
            "nonfactual": counts.sentence_nonfactual,
            "total": counts.sentence_total,
        },
        "captions": {
            "factual": counts.caption_factual,
            "nonfactual": counts.caption_nonfactual,
            "total": counts.caption_total,
        },
    }


def _agreement_measures(instances) -> tuple[float | None, float | None]:
    """Sentence-level annotator agreement: binary kappa, set majority."""
    binary_rows: list[list[int]] = []
    set_rows: list[dict[frozenset, int]] = []
    rater_counts = set()
    for inst in instances:
        for per_annotator in inst.annotations:
            rater_counts.add(len(per_annotator))
            factual = sum(
                1 for labels in per_annotator if not (labels & FACTUAL_ERROR_TYPES)
            )
            binary_rows.append([factual, len(per_annotator) - factual])
            tally: dict[frozenset, int] = {}
            for labels in per_annotator:
                tally[labels] = tally.get(labels, 0) + 1
            set_rows.append(tally)
    if len(rater_counts) != 1:
        return None, None
    try:
        kappa = fleiss_kappa(binary_rows)
    except (DegenerateAgreementError, ValueError):
        kappa = None
    categories = sorted(
        {labels for tally in set_rows for labels in tally},
        key=lambda s: sorted(e.value for e in s),
    )
    matrix = [[tally.get(cat, 0) for cat in categories] for tally in set_rows]
    try:
        majority = majority_agreement(matrix)
    except ValueError:
        majority = None
    return kappa, majority


def cmd_stats(cfg: dict[str, Any]) -> int:
    if (cfg["dataset"] is None) == (cfg["release"] is None):
        raise CliError(
            EXIT_VALIDATION, "validation", "need exactly one of --dataset / --release"
        )
    instances = _load_annotated(cfg["dataset"], cfg["release"])
    stats = split_stats(instances)
    kappa, majority = _agreement_measures(instances)
    total = stats.total
    report: dict[str, Any] = {
        "splits": {
            split.value: _counts_block(counts)
            for split, counts in stats.per_split.items()
        },
        "total": _counts_block(total),
        "caption_nonfactual_pct": (
            round(100.0 * total.caption_nonfactual / total.caption_total, 2)
            if total.caption_total
            else None
        ),
        "fleiss_kappa": kappa,
        "majority_agreement_pct": majority,
    }
    _write_json_report(cfg["out"], report)
    if cfg["csv"] is not None:
        rows = ["split,sentence_factual,sentence_nonfactual,caption_factual,caption_nonfactual"]
        for split in Split:
            counts = stats.per_split[split]
            rows.append(
                f"{split.value},{counts.sentence_factual},{counts.sentence_nonfactual},"
                f"{counts.caption_factual},{counts.caption_nonfactual}"
            )
        rows.append(
            f"total,{total.sentence_factual},{total.sentence_nonfactual},"
            f"{total.caption_factual},{total.caption_nonfactual}"
        )
        with open(cfg["csv"], "w", encoding="utf-8") as fh:
            fh.write("\n".join(rows) + "\n")
    _write_sidecar(cfg["out"], "stats", cfg)
    return EXIT_OK


def cmd_table_eval(cfg: dict[str, Any]) -> int:
    def load_tables(path: str) -> dict[str, Any]:
        tables = {}
        for rec in _read_jsonl(path, required=("id", "table_linearized")):
            try:
                tables[rec["id"]] = parse_linearized(rec["table_linearized"])
            except ValueError as exc:
                raise CliError(
                    EXIT_VALIDATION, "validation", f"{path}: {rec['id']}: {exc}"
                )
        return tables

    pred = load_tables(cfg["pred"])
    gold = load_tables(cfg["gold"])
    missing = sorted(set(pred) - set(gold))
    if missing:
        raise CliError(
            EXIT_VALIDATION, "validation", f"ids missing from gold: {missing[:5]}"
        )
    if not pred:
        raise CliError(EXIT_VALIDATION, "validation", "no predicted tables")
    per_id = {pid: rms_f1(table, gold[pid]) for pid, table in pred.items()}
    report = {
        "n": len(per_id),
        "mean_rms_f1": _mean(list(per_id.values())),
        "per_id": dict(sorted(per_id.items())),
    }
    _write_json_report(cfg["out"], report)
    _write_sidecar(cfg["out"], "table-eval", cfg)
    return EXIT_OK


_RUNNERS = {
    "gen-negatives": cmd_gen_negatives,
    "score": cmd_score,
    "correct": cmd_correct,
    "evaluate": cmd_evaluate,
    "meta-eval": cmd_meta_eval,
    "stats": cmd_stats,
    "table-eval": cmd_table_eval,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        namespace = parser.parse_args(argv)
        cfg = resolve_config(namespace.command, namespace)
        if cfg["dry_run"]:
            print(
                json.dumps(
                    _plan(namespace.command, cfg),
                    sort_keys=True,
                    indent=2,
                    ensure_ascii=False,
                )
            )
            return EXIT_OK
        return _RUNNERS[namespace.command](cfg)
    except CliError as exc:
        _emit_error(exc.category, str(exc))
        return exc.exit_code
    except (BackendUnavailableError, BackendError) as exc:
        _emit_error("backend", str(exc))
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
