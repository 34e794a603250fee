"""Command-line entry point wiring the toolkit's analyses.

Subcommands: neighbors, verdicts, probe, sts, wer, report, calibrate.
Flags override config-file values. Exit codes: 0 ok, 2 bad input,
3 provider failure, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import asr_eval, probes, report as report_mod
from .config import RunConfig
from .errors import ConfigError, InterchangeError, MalensError, ProviderError
from .interchange import load_corpus
from .neighbor import save_assignments
from .pipeline import compute_assignments, run_verdicts
from .verdict import MultilingualEmbeddingSpace, calibrate_threshold, save_verdicts

log = logging.getLogger("malens")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PROVIDER = 3
EXIT_INTERNAL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="malens",
                                     description="modality-adapter representation analysis")
    parser.add_argument("--config", help="run configuration JSON")
    parser.add_argument("--manifest", help="corpus manifest (overrides config)")
    parser.add_argument("--output-dir", help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, help="seed (overrides config)")
    parser.add_argument("--stage", help="representation stage (overrides config)")
    parser.add_argument("--force", action="store_true",
                        help="overwrite existing outputs")
    parser.add_argument("--dry-run", action="store_true",
                        help="validate inputs without provider calls")
    parser.add_argument("--jobs", type=int, default=1, help="worker cap")
    parser.add_argument("-v", "--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("neighbors", help="nearest-token assignment per frame")
    p_verdicts = sub.add_parser("verdicts", help="word verdict ladder + reports")
    p_verdicts.add_argument("--steps", help="comma-separated ladder steps, e.g. 3a,3b")
    p_probe = sub.add_parser("probe", help="linear probe accuracy")
    p_probe.add_argument("--level", choices=["word", "phone"])
    sub.add_parser("sts", help="spoken STS Spearman evaluation")
    p_wer = sub.add_parser("wer", help="WER and language-match scoring")
    p_wer.add_argument("--hypotheses", help="hypothesis file (overrides config)")
    p_report = sub.add_parser("report", help="re-emit distributions from a verdict file")
    p_report.add_argument("--verdict-file", required=True)
    p_report.add_argument("--format", default="StructuredText",
                          choices=["Table", "DelimitedValues", "StructuredText"])
    p_calibrate = sub.add_parser("calibrate", help="semantic threshold from SimLex-style pairs")
    p_calibrate.add_argument("--cutoff", type=float, default=7.0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = RunConfig.load(args.config) if args.config else RunConfig()
        _apply_overrides(config, args)
        handler = {
            "neighbors": cmd_neighbors,
            "verdicts": cmd_verdicts,
            "probe": cmd_probe,
            "sts": cmd_sts,
            "wer": cmd_wer,
            "report": cmd_report,
            "calibrate": cmd_calibrate,
        }[args.command]
        return handler(config, args)
    except (ConfigError, InterchangeError, FileNotFoundError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except ProviderError as exc:
        log.error("provider failure: %s", exc)
        return EXIT_PROVIDER
    except MalensError as exc:
        log.error("internal error: %s", exc)
        return EXIT_INTERNAL


def _apply_overrides(config: RunConfig, args) -> None:
    if args.manifest:
        config.manifest = args.manifest
    if args.output_dir:
        config.output_dir = args.output_dir
    if args.seed is not None:
        config.seed = args.seed
    if args.stage:
        config.stage = args.stage
    if getattr(args, "steps", None):
        import dataclasses

        config.verdict = dataclasses.replace(
            config.verdict, enable_steps=frozenset(args.steps.split(",")))
    if getattr(args, "level", None):
        config.probe.level = args.level
    if getattr(args, "hypotheses", None):
        config.hypotheses = args.hypotheses


def _require_manifest(config: RunConfig):
    if config.manifest is None:
        raise ConfigError("no corpus manifest given (config 'manifest' or --manifest)")
    return load_corpus(config.manifest)


def _output_dir(config: RunConfig, force: bool, *filenames: str) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not force:
        existing = [name for name in filenames if (out / name).exists()]
        if existing:
            raise ConfigError(
                f"outputs already exist in {out} ({existing[0]}, ...); pass --force to overwrite"
            )
    return out


def _load_space(config: RunConfig) -> MultilingualEmbeddingSpace | None:
    if not config.muse:
        return None
    return MultilingualEmbeddingSpace.from_text_files(config.muse)


def cmd_neighbors(config: RunConfig, args) -> int:
    corpus = _require_manifest(config)
    if args.dry_run:
        log.info("dry run: corpus %s with %d utterances validates",
                 corpus.manifest.corpus_id, len(corpus))
        return EXIT_OK
    provider = config.build_provider()
    started = time.monotonic()
    assignments = compute_assignments(corpus, config.stage, provider)
    out = _output_dir(config, args.force,
                      *[f"{utt}.assignments.jsonl" for utt in assignments])
    sentinels = 0
    for utterance_id, utt_assignments in assignments.items():
        sentinels += sum(1 for a in utt_assignments if a.is_no_neighbor)
        save_assignments(out / f"{utterance_id}.assignments.jsonl",
                         utterance_id, utt_assignments)
    log.info("assigned %d utterances in %.2fs (%d no-neighbor frames)",
             len(assignments), time.monotonic() - started, sentinels)
    return EXIT_OK


def cmd_verdicts(config: RunConfig, args) -> int:
    corpus = _require_manifest(config)
    if args.dry_run:
        log.info("dry run: corpus %s with %d utterances validates",
                 corpus.manifest.corpus_id, len(corpus))
        return EXIT_OK
    provider = config.build_provider()
    space = _load_space(config)
    run = run_verdicts(corpus, provider, config.verdict, space=space,
                       stage=config.stage, min_overlap_ms=config.min_overlap_ms)
    out = _output_dir(config, args.force, "verdicts.jsonl",
                      "token_languages.json", "token_languages.csv",
                      "verdict_distribution.json", "verdict_distribution.csv")
    save_verdicts(out / "verdicts.jsonl", sorted(run.verdicts.items()))
    corpus_id = corpus.manifest.corpus_id
    all_assignments = [a for _, utt in sorted(run.assignments.items()) for a in utt]
    lang_report = report_mod.token_language_distribution(all_assignments, corpus_id)
    report_mod.emit(lang_report, report_mod.FORMAT_STRUCTURED, out / "token_languages.json")
    report_mod.emit(lang_report, report_mod.FORMAT_DELIMITED, out / "token_languages.csv")
    all_verdicts = [v for _, utt in sorted(run.verdicts.items()) for v in utt]
    verdict_report = report_mod.verdict_distribution(all_verdicts, corpus_id, basis="all")
    report_mod.emit(verdict_report, report_mod.FORMAT_STRUCTURED,
                    out / "verdict_distribution.json")
    report_mod.emit(verdict_report, report_mod.FORMAT_DELIMITED,
                    out / "verdict_distribution.csv")
    print(f"corpus {corpus_id}: top languages {run.top_languages}")
    for label in verdict_report.ordered_labels():
        print(f"  {label}: {verdict_report.counts[label]}")
    return EXIT_OK


def cmd_probe(config: RunConfig, args) -> int:
    corpus = _require_manifest(config)
    if args.dry_run:
        log.info("dry run: corpus validates for probing")
        return EXIT_OK
    settings = config.probe
    dataset = probes.build_probe_dataset(
        corpus, config.stage, settings.level,
        min_label_count=settings.min_label_count, seed=config.seed,
        min_overlap_ms=config.min_overlap_ms,
        train_fraction=settings.train_fraction,
    )
    model = probes.train_linear_probe(
        dataset, epochs=settings.epochs, learning_rate=settings.learning_rate,
        l2=settings.l2, seed=config.seed, batch_size=settings.batch_size,
    )
    accuracy = probes.evaluate_probe(model, dataset, split="test")
    out = _output_dir(config, args.force, "probe_results.json")
    (out / "probe_results.json").write_text(json.dumps({
        "stage": config.stage,
        "level": settings.level,
        "accuracy": accuracy,
        "num_examples": int(len(dataset.labels)),
        "num_labels": dataset.num_labels,
        "final_loss": model.final_loss,
    }, indent=2) + "\n", encoding="utf-8")
    print(f"{config.stage} {settings.level} accuracy: {100 * accuracy:.1f}%")
    return EXIT_OK


def cmd_sts(config: RunConfig, args) -> int:
    if config.sts_pairs is None:
        raise ConfigError("no sts_pairs file given in config")
    from .interchange import load_representation_sequence

    doc = json.loads(Path(config.sts_pairs).read_text(encoding="utf-8"))
    base = Path(config.sts_pairs).parent
    if args.dry_run:
        log.info("dry run: %d STS pairs parse", len(doc))
        return EXIT_OK
    pairs = [
        (load_representation_sequence(base / item["a"]),
         load_representation_sequence(base / item["b"]),
         float(item["score"]))
        for item in doc
    ]
    result = probes.sts_eval(pairs)
    print(f"SpokenSTS rho: {result.rho:.4f} over {result.num_pairs} pairs")
    return EXIT_OK


def cmd_wer(config: RunConfig, args) -> int:
    corpus = _require_manifest(config)
    if config.hypotheses is None:
        raise ConfigError("no hypotheses file given (config 'hypotheses' or --hypotheses)")
    hypotheses = asr_eval.load_hypotheses(
        config.hypotheses, language=corpus.manifest.language)
    if args.dry_run:
        log.info("dry run: %d hypotheses parse", len(hypotheses.hypotheses))
        return EXIT_OK
    references = {}
    for i in range(len(corpus)):
        record = corpus.record(i)
        references[record.utterance_id] = " ".join(w.surface for w in record.words)
    scheme = config.wer.scheme_by_language.get(corpus.manifest.language,
                                               config.wer.scheme)
    wer_value = asr_eval.corpus_wer(references, hypotheses, scheme)
    provider = config.build_provider()
    lang_pct = asr_eval.lang_match_rate(hypotheses, corpus.manifest.language, provider)
    out = _output_dir(config, args.force, "wer.json")
    (out / "wer.json").write_text(json.dumps({
        "corpus_id": corpus.manifest.corpus_id,
        "language": corpus.manifest.language,
        "wer_percent": 100 * wer_value,
        "lang_match_percent": lang_pct,
    }, indent=2) + "\n", encoding="utf-8")
    print(f"{corpus.manifest.corpus_id}: WER {100 * wer_value:.1f}% "
          f"/ %Lang {lang_pct:.0f}")
    return EXIT_OK


def cmd_report(config: RunConfig, args) -> int:
    from .verdict import load_verdicts

    entries = load_verdicts(args.verdict_file)
    if args.dry_run:
        log.info("dry run: %d verdict records parse", len(entries))
        return EXIT_OK
    verdicts = [v for _, v in entries]
    rep = report_mod.verdict_distribution(verdicts, basis="all")
    out = _output_dir(config, args.force, "verdict_distribution_report.json")
    suffix = {"Table": "txt", "DelimitedValues": "csv", "StructuredText": "json"}[args.format]
    report_mod.emit(rep, args.format, out / f"verdict_distribution_report.{suffix}")
    print(f"wrote verdict_distribution_report.{suffix} "
          f"({rep.total} counted, {rep.excluded} excluded)")
    return EXIT_OK


def cmd_calibrate(config: RunConfig, args) -> int:
    if config.simlex is None:
        raise ConfigError("no simlex pairs file given in config")
    space = _load_space(config)
    if space is None:
        raise ConfigError("calibration requires a muse embedding space in config")
    pairs = []
    with open(config.simlex, encoding="utf-8") as f:
        for line in f:
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 3 or parts[0] == "word1":
                continue
            pairs.append((parts[0], parts[1], float(parts[2])))
    if args.dry_run:
        log.info("dry run: %d calibration pairs parse", len(pairs))
        return EXIT_OK
    threshold = calibrate_threshold(pairs, space, high_cutoff=args.cutoff)
    print(f"calibrated semantic threshold: {threshold:.4f}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
