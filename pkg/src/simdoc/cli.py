"""Command-line entry point.

Subcommands: build-corpus, score, train-coherence, run-experiment, compare.
Exit codes: 0 success, 1 domain error (printed by name on stderr), 2 usage
or configuration error. stdout carries only data/results.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import backend as backend_mod
from . import coherence as coherence_mod
from . import corpus as corpus_mod
from . import harness, metrics
from .errors import ConfigError, NoText, SimdocError
from .textproc import document_from_text


def _read_leveled_dir(path: Path) -> list[corpus_mod.LeveledArticle]:
    """Directory of '<article_id>.<level>.txt' files, one per version."""
    versions: dict[str, dict[int, str]] = {}
    for file in sorted(path.glob("*.txt")):
        parts = file.stem.rsplit(".", 1)
        if len(parts) != 2 or not parts[1].isdigit():
            continue
        article_id, level = parts[0], int(parts[1])
        versions.setdefault(article_id, {})[level] = file.read_text(encoding="utf-8")
    return [
        corpus_mod.LeveledArticle(article_id=aid, versions=vers)
        for aid, vers in sorted(versions.items())
    ]


def _read_pairs_dir(path: Path) -> list[tuple[str, str]]:
    """Directory of '<id>.src.txt' / '<id>.tgt.txt' pairs."""
    pairs = []
    for src_file in sorted(path.glob("*.src.txt")):
        tgt_file = src_file.with_name(src_file.name.replace(".src.txt", ".tgt.txt"))
        if tgt_file.exists():
            pairs.append(
                (src_file.read_text(encoding="utf-8"), tgt_file.read_text(encoding="utf-8"))
            )
    return pairs


def cmd_build_corpus(args) -> int:
    out = Path(args.out)
    if args.scheme in ("newsela-s", "newsela-sl", "pairs"):
        in_path = Path(getattr(args, "in"))
        if not in_path.is_dir():
            print(f"input directory {in_path} does not exist", file=sys.stderr)
            return 2
    if args.scheme == "newsela-s":
        articles = _read_leveled_dir(Path(getattr(args, "in")))
        instances, skipped = corpus_mod.build_newsela_s(articles, frame=args.frame)
        corpus_mod.write_corpus(instances, out)
        print(f"{len(instances)} instances")
        print(f"{len(skipped)} skipped: {' '.join(skipped)}".rstrip())
    elif args.scheme == "newsela-sl":
        articles = _read_leveled_dir(Path(getattr(args, "in")))
        instances = corpus_mod.build_newsela_sl(articles, frame=args.frame)
        corpus_mod.write_corpus(instances, out)
        print(f"{len(instances)} instances")
    elif args.scheme == "pairs":
        pairs = _read_pairs_dir(Path(getattr(args, "in")))
        instances = corpus_mod.ingest_pairs(pairs, frame=args.frame)
        corpus_mod.write_corpus(instances, out)
        print(f"{len(instances)} instances")
    elif args.scheme == "synthetic":
        articles = corpus_mod.generate_synthetic_corpus(args.seed, args.n)
        if args.pairing == "s":
            instances, _ = corpus_mod.build_newsela_s(articles, frame=args.frame)
        else:
            instances = corpus_mod.build_newsela_sl(articles, frame=args.frame)
        corpus_mod.write_corpus(instances, out)
        print(f"{len(instances)} instances")
    elif args.scheme == "gcdc":
        in_path = Path(getattr(args, "in"))
        if not in_path.is_file():
            print(f"input file {in_path} does not exist", file=sys.stderr)
            return 2
        records = corpus_mod.read_gcdc_file(in_path)
        examples = corpus_mod.ingest_gcdc(records, frame=args.frame)
        with open(out, "w", encoding="utf-8") as handle:
            for (text, ratings), example in zip(records, examples):
                handle.write(
                    json.dumps(
                        {
                            "text": text,
                            "expert_ratings": ratings,
                            "consensus_class": example.consensus_class,
                            "binary_label": example.binary_label,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
        print(f"{len(examples)} examples")
    return 0


def _read_document_lines(path: Path, frame: int):
    lines = [l for l in path.read_text(encoding="utf-8").splitlines() if l.strip()]
    if not lines:
        raise NoText(f"{path} holds no documents")
    return [
        document_from_text(line, frame=frame, doc_id=f"{path.name}:{i}")
        for i, line in enumerate(lines)
    ]


def cmd_score(args) -> int:
    for name in ("source", "prediction", "reference"):
        if not Path(getattr(args, name)).is_file():
            print(f"{name} file {getattr(args, name)} does not exist", file=sys.stderr)
            return 2
    sources = _read_document_lines(Path(args.source), args.frame)
    predictions = _read_document_lines(Path(args.prediction), args.frame)
    references = _read_document_lines(Path(args.reference), args.frame)
    if not (len(sources) == len(predictions) == len(references)):
        print("source/prediction/reference line counts differ", file=sys.stderr)
        return 2
    n = len(sources)
    values = {
        "FKGL": sum(metrics.fkgl(p) for p in predictions) / n,
        "FRE": sum(metrics.fre(p) for p in predictions) / n,
        "SARI": sum(
            metrics.sari(s, p, [r]) for s, p, r in zip(sources, predictions, references)
        )
        / n,
        "D-SARI": sum(
            metrics.d_sari(s, p, [r]) for s, p, r in zip(sources, predictions, references)
        )
        / n,
    }
    if args.format == "tsv":
        print("\t".join(values))
        print("\t".join(f"{v:.3f}" for v in values.values()))
    else:
        width = max(len(k) for k in values)
        for key, value in values.items():
            print(f"{key.ljust(width)}  {value:.3f}")
    return 0


def cmd_train_coherence(args) -> int:
    in_path = Path(getattr(args, "in"))
    if not in_path.is_file():
        print(f"input file {in_path} does not exist", file=sys.stderr)
        return 2
    records = corpus_mod.read_gcdc_file(in_path)
    examples = corpus_mod.ingest_gcdc(records, frame=args.frame)
    seed = int(os.environ.get("SIMDOC_SEED", args.seed))
    model = coherence_mod.train_coherence(
        examples, learning_rate=args.learning_rate, epochs=args.epochs, seed=seed
    )
    coherence_mod.save_model(model, args.out)
    print(f"examples {len(examples)}")
    print(f"initial_loss {model.training_log[0][1]:.6f}")
    print(f"final_loss {model.training_log[-1][1]:.6f}")
    return 0


def _load_experiment_inputs(config_path: Path):
    config, extras = harness.parse_config_text(config_path.read_text(encoding="utf-8"))
    env_seed = os.environ.get("SIMDOC_SEED")
    if env_seed is not None:
        config = harness.ExperimentConfig(
            **{**config.__dict__, "seed": int(env_seed)}
        )
    corpora = {}
    for key, value in extras.items():
        if key.startswith("corpus."):
            corpora[key[len("corpus."):]] = corpus_mod.read_corpus(value, frame=config.frame)
    if "coherence_model" not in extras:
        raise ConfigError("config needs a 'coherence_model = <path>' entry")
    coherence_model = coherence_mod.load_model(extras["coherence_model"])
    return config, extras, corpora, coherence_model


def _make_backend(extras: dict[str, str]):
    command = extras.get("backend_command")
    if command:
        return backend_mod.spawn_external(command)
    return backend_mod.BuiltinBackend()


def cmd_run_experiment(args) -> int:
    config_path = Path(args.config)
    if not config_path.is_file():
        print(f"config file {config_path} does not exist", file=sys.stderr)
        return 2
    config, extras, corpora, coherence_model = _load_experiment_inputs(config_path)
    backend = _make_backend(extras)
    try:
        result = harness.run_experiment(config, corpora, backend, coherence_model)
    finally:
        backend.close()
    harness.write_result(result, args.out, extras=extras)
    row = metrics.report_row(
        extras.get("backend_command", "builtin"),
        config.eval_corpus,
        config.loss_mode.mode,
        config.regime,
        result.report,
    )
    print(metrics.rows_to_tsv([row]), end="")
    return 0


def cmd_compare(args) -> int:
    configs = []
    merged_extras: dict[str, str] = {}
    for path_str in args.configs:
        path = Path(path_str)
        if not path.is_file():
            print(f"config file {path} does not exist", file=sys.stderr)
            return 2
        config, extras = harness.parse_config_text(path.read_text(encoding="utf-8"))
        configs.append(config)
        merged_extras.update(extras)
    corpora = {}
    for key, value in merged_extras.items():
        if key.startswith("corpus."):
            corpora[key[len("corpus."):]] = corpus_mod.read_corpus(value)
    if "coherence_model" not in merged_extras:
        raise ConfigError("configs need a 'coherence_model = <path>' entry")
    coherence_model = coherence_mod.load_model(merged_extras["coherence_model"])
    rows, _ = harness.compare_regimes(
        configs, corpora, lambda: _make_backend(merged_extras), coherence_model
    )
    table = metrics.rows_to_table(rows)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.tsv").write_text(metrics.rows_to_tsv(rows), encoding="utf-8")
        (out / "comparison.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simdoc", description="document-level simplification toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-corpus", help="build a corpus file from raw inputs")
    p.add_argument("--scheme", required=True,
                   choices=["newsela-s", "newsela-sl", "pairs", "synthetic", "gcdc"])
    p.add_argument("--in", dest="in", help="input directory or file")
    p.add_argument("--out", required=True)
    p.add_argument("--frame", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--pairing", choices=["s", "sl"], default="sl")
    p.set_defaults(func=cmd_build_corpus)

    p = sub.add_parser("score", help="score predictions against references")
    p.add_argument("--source", required=True)
    p.add_argument("--prediction", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--format", choices=["table", "tsv"], default="table")
    p.add_argument("--frame", type=int, default=10)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("train-coherence", help="train the coherence scorer")
    p.add_argument("--in", dest="in", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--learning-rate", type=float, default=coherence_mod.DEFAULT_LEARNING_RATE)
    p.add_argument("--epochs", type=int, default=coherence_mod.DEFAULT_EPOCHS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frame", type=int, default=10)
    p.set_defaults(func=cmd_train_coherence)

    p = sub.add_parser("run-experiment", help="run one experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run_experiment)

    p = sub.add_parser("compare", help="run several configs and tabulate")
    p.add_argument("configs", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return 2
    except SimdocError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
