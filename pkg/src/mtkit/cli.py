"""Command-line entry points for the individual stages and the manifest runner.

Exit codes: 0 on success, 1 for validation problems (bad arguments or
manifest diagnostics), 2 for stage failures (contract violations, broken
input files, failing external commands).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import alignment, augment, cleaning, denoise, metrics, sampling, subword
from .corpus import (
    corpus_stats,
    read_mono,
    read_parallel,
    swap_direction,
    write_mono,
    write_parallel,
)
from .errors import CorpusFormatError, ManifestError, MtkitError, StageError
from .manifest import load_manifest, validate_manifest
from .pipeline import run_manifest


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _read_corpus(args) -> "Corpus":
    return read_parallel(
        args.input,
        getattr(args, "source_lang", "src"),
        getattr(args, "target_lang", "tgt"),
        fmt=getattr(args, "format", "tsv"),
        target_path=getattr(args, "target_input", None),
    )


def _write_corpus(corpus, args) -> None:
    write_parallel(
        corpus,
        args.output,
        fmt=getattr(args, "format", "tsv"),
        target_path=getattr(args, "target_output", None),
    )


def _print_stage_report(report) -> None:
    print(f"stage: {report.stage}")
    print(f"input: {report.input_count}")
    print(f"output: {report.output_count}")
    for rule, count in report.removed.items():
        print(f"removed.{rule}: {count}")


def _add_corpus_io(sub, output: bool = True) -> None:
    sub.add_argument("--input", required=True, help="corpus TSV file")
    if output:
        sub.add_argument("--output", required=True, help="destination TSV file")
    sub.add_argument("--source-lang", default="src")
    sub.add_argument("--target-lang", default="tgt")


def _cmd_clean(args) -> int:
    cfg = cleaning.CleaningConfig(
        max_tokens=args.max_tokens,
        max_consecutive_repeats=args.max_consecutive_repeats,
        min_distinct_ratio=args.min_distinct_ratio,
    )
    cleaned, report = cleaning.clean_corpus(_read_corpus(args), cfg)
    _write_corpus(cleaned, args)
    _print_stage_report(report)
    return 0


def _cmd_align_train(args) -> int:
    cfg = alignment.AlignTrainConfig(
        iterations=args.iterations,
        p0=args.p0,
        tension=args.tension,
        smoothing_floor=args.smoothing_floor,
    )
    corpus = _read_corpus(args)
    if args.reverse:
        corpus = swap_direction(corpus)
    model = alignment.train_alignment(corpus, cfg)
    alignment.write_model(model, args.model)
    for i, ll in enumerate(model.log_likelihoods, start=1):
        print(f"iteration {i}: log-likelihood {ll:.4f}")
    return 0


def _cmd_align_filter(args) -> int:
    forward = alignment.read_model(args.forward_model)
    reverse = alignment.read_model(args.reverse_model)
    if args.absolute is not None:
        policy = alignment.AlignFilterPolicy("absolute", args.absolute)
    else:
        policy = alignment.AlignFilterPolicy("percentile", args.percentile)
    filtered, report = alignment.filter_by_alignment(_read_corpus(args), forward, reverse, policy)
    _write_corpus(filtered, args)
    _print_stage_report(report)
    return 0


def _cmd_bpe_train(args) -> int:
    inputs = []
    for path in args.input or []:
        inputs.append(read_parallel(path))
    for path in args.mono_input or []:
        inputs.append(read_mono(path))
    if not inputs:
        raise ValueError("bpe-train needs at least one --input or --mono-input")
    model = subword.train_bpe(inputs, args.vocab_size)
    subword.write_bpe_model(model, args.model)
    print(f"pieces: {len(model.vocab)}")
    print(f"merges: {len(model.merges)}")
    return 0


def _cmd_bpe_encode(args) -> int:
    model = subword.read_bpe_model(args.model)
    with open(args.input, "r", encoding="utf-8") as fin, open(
        args.output, "w", encoding="utf-8", newline="\n"
    ) as fout:
        for line in fin:
            fout.write(" ".join(subword.encode(model, line.rstrip("\n"))) + "\n")
    return 0


def _cmd_bpe_decode(args) -> int:
    model = subword.read_bpe_model(args.model)
    with open(args.input, "r", encoding="utf-8") as fin, open(
        args.output, "w", encoding="utf-8", newline="\n"
    ) as fout:
        for line in fin:
            fout.write(subword.decode(model, line.split()) + "\n")
    return 0


def _cmd_ratios(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    ratios = sampling.compute_ratios(sizes, args.temperature)
    print("language  size      ratio")
    for i, (n, lam) in enumerate(zip(sizes, ratios)):
        print(f"L{i:<7} {n:<9} {lam:.4f}")
    return 0


def _cmd_upsample(args) -> int:
    corpus = _read_corpus(args)
    pairs = sampling.replicate_fractional(
        corpus.pairs, args.ratio, args.seed, f"upsample:{corpus.target_lang}"
    )
    _write_corpus(corpus.with_pairs(pairs), args)
    print(f"input: {len(corpus)}")
    print(f"output: {len(pairs)}")
    return 0


def _cmd_tag(args) -> int:
    corpus = _read_corpus(args)
    scheme = sampling.TagScheme.for_languages([args.tag_lang])
    _write_corpus(sampling.tag_language(corpus, scheme, args.tag_lang), args)
    return 0


def _cmd_mix(args) -> int:
    corpora = [read_parallel(path) for path in args.inputs]
    weights = args.weights or [1.0] * len(corpora)
    if len(weights) != len(corpora):
        raise ValueError(
            f"{len(weights)} weights given for {len(corpora)} inputs"
        )
    scaled = [
        c.with_pairs(
            sampling.replicate_fractional(c.pairs, w, args.seed, f"mix:{i}")
        )
        for i, (c, w) in enumerate(zip(corpora, weights))
    ]
    mixed = sampling.mix_shuffle(scaled, args.seed)
    write_parallel(mixed, args.output)
    print(f"output: {len(mixed)}")
    return 0


def _cmd_denoise(args) -> int:
    if args.scorer == "files":
        if not (args.source_embeddings and args.target_embeddings):
            raise ValueError("files scorer needs --source-embeddings and --target-embeddings")
        scorer = denoise.EmbeddingFileScorer(
            Path(args.source_embeddings), Path(args.target_embeddings)
        )
    else:
        if not args.scorer_cmd:
            raise ValueError("cmd scorer needs --scorer-cmd")
        scorer = denoise.ExternalScorer(args.scorer_cmd)
    scored = denoise.score_corpus(_read_corpus(args), scorer)
    filtered, report = denoise.filter_by_similarity(
        scored, denoise.DenoiseConfig(threshold=args.threshold)
    )
    _write_corpus(filtered, args)
    _print_stage_report(report)
    return 0


def _cmd_ft(args) -> int:
    mono = read_mono(args.mono, args.source_lang)
    if args.sample_size is not None:
        mono = augment.sample_monolingual(mono, args.sample_size, args.seed)
    teacher = augment.Translator(args.teacher_cmd, args.source_lang, args.target_lang)
    corpus = augment.forward_translate(mono, teacher)
    write_parallel(corpus, args.output)
    print(f"output: {len(corpus)}")
    return 0


def _cmd_bt(args) -> int:
    mono = read_mono(args.mono, args.target_lang)
    reverse = augment.Translator(args.teacher_cmd, args.target_lang, args.source_lang)
    corpus = augment.back_translate(mono, reverse)
    write_parallel(corpus, args.output)
    print(f"output: {len(corpus)}")
    return 0


def _cmd_tel_assemble(args) -> int:
    dev = read_mono(args.dev, args.source_lang)
    hyps = [read_mono(path, args.target_lang) for path in args.hyp]
    tel = augment.assemble_transductive_set(dev, hyps, args.target_lang)
    write_parallel(tel, args.output)
    print(f"output: {len(tel)}")
    return 0


def _read_lines_file(path: str) -> list[str]:
    with open(path, "r", encoding="utf-8") as f:
        return f.read().splitlines()


def _cmd_score(args) -> int:
    hyps = _read_lines_file(args.hyp)
    refs = _read_lines_file(args.ref)
    if args.metric in ("bleu", "both"):
        report = metrics.bleu_corpus(hyps, refs)
        print(f"BLEU: {report.bleu:.4f}")
        for n, p in enumerate(report.precisions, start=1):
            print(f"p{n}: {p:.4f}")
        print(f"brevity_penalty: {report.brevity_penalty:.4f}")
    if args.metric in ("chrf++", "both"):
        print(f"chrF++: {metrics.chrf_corpus(hyps, refs):.4f}")
    return 0


def _cmd_stats(args) -> int:
    report = corpus_stats(_read_corpus(args))
    print(f"total: {report.total}")
    for kind, count in sorted(report.by_provenance.items()):
        print(f"provenance.{kind}: {count}")
    print(f"source_tokens: {report.source_tokens}")
    print(f"target_tokens: {report.target_tokens}")
    return 0


def _cmd_validate(args) -> int:
    diagnostics = validate_manifest(load_manifest(args.manifest))
    for diag in diagnostics:
        print(diag)
    if diagnostics:
        return 1
    print("manifest ok")
    return 0


def _cmd_run(args) -> int:
    report = run_manifest(load_manifest(args.manifest))
    print(report.to_text(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clean", help="rule-based cleaning")
    _add_corpus_io(p)
    p.add_argument("--max-tokens", type=int, default=80)
    p.add_argument("--max-consecutive-repeats", type=int, default=3)
    p.add_argument("--min-distinct-ratio", type=float, default=0.3)
    p.set_defaults(fn=_cmd_clean)

    p = sub.add_parser("align-train", help="train an alignment model")
    _add_corpus_io(p, output=False)
    p.add_argument("--model", required=True, help="model file to write")
    p.add_argument("--reverse", action="store_true", help="train the reversed direction")
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--p0", type=float, default=0.08)
    p.add_argument("--tension", type=float, default=4.0)
    p.add_argument("--smoothing-floor", type=float, default=1e-9)
    p.set_defaults(fn=_cmd_align_train)

    p = sub.add_parser("align-filter", help="drop poorly aligned pairs")
    _add_corpus_io(p)
    p.add_argument("--forward-model", required=True)
    p.add_argument("--reverse-model", required=True)
    p.add_argument("--percentile", type=float, default=10.0)
    p.add_argument("--absolute", type=float, default=None, help="absolute score threshold")
    p.set_defaults(fn=_cmd_align_filter)

    p = sub.add_parser("bpe-train", help="train a joint subword model")
    p.add_argument("--input", action="append", help="parallel TSV (both sides used); repeatable")
    p.add_argument("--mono-input", action="append", help="plain text file; repeatable")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab-size", type=int, default=32000)
    p.set_defaults(fn=_cmd_bpe_train)

    p = sub.add_parser("bpe-encode", help="segment text into pieces")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_bpe_encode)

    p = sub.add_parser("bpe-decode", help="reassemble text from pieces")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_bpe_decode)

    p = sub.add_parser("ratios", help="print upsampling ratios for corpus sizes")
    p.add_argument("--sizes", required=True, help="comma-separated corpus sizes")
    p.add_argument("--temperature", type=float, default=2.0)
    p.set_defaults(fn=_cmd_ratios)

    p = sub.add_parser("upsample", help="replicate a corpus by a ratio")
    _add_corpus_io(p)
    p.add_argument("--ratio", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_upsample)

    p = sub.add_parser("tag", help="prepend a target-language tag to sources")
    _add_corpus_io(p)
    p.add_argument("--tag-lang", required=True)
    p.set_defaults(fn=_cmd_tag)

    p = sub.add_parser("mix", help="weight-scale, concatenate, and shuffle corpora")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--weights", nargs="+", type=float, default=None,
                   help="per-input replication ratio (default 1 each)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_mix)

    p = sub.add_parser("denoise", help="similarity-filter a corpus")
    _add_corpus_io(p)
    p.add_argument("--threshold", type=float, default=0.7)
    p.add_argument("--scorer", choices=("files", "cmd"), default="files")
    p.add_argument("--source-embeddings")
    p.add_argument("--target-embeddings")
    p.add_argument("--scorer-cmd", help="external scorer command")
    p.set_defaults(fn=_cmd_denoise)

    p = sub.add_parser("ft", help="forward-translate source monolingual data")
    p.add_argument("--mono", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--teacher-cmd", required=True)
    p.add_argument("--source-lang", default="src")
    p.add_argument("--target-lang", default="tgt")
    p.add_argument("--sample-size", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_ft)

    p = sub.add_parser("bt", help="back-translate target monolingual data")
    p.add_argument("--mono", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--teacher-cmd", required=True)
    p.add_argument("--source-lang", default="src")
    p.add_argument("--target-lang", default="tgt")
    p.set_defaults(fn=_cmd_bt)

    p = sub.add_parser("tel-assemble", help="build a dev-set finetuning corpus")
    p.add_argument("--dev", required=True, help="dev source lines")
    p.add_argument("--hyp", action="append", required=True, help="model output file; repeatable")
    p.add_argument("--output", required=True)
    p.add_argument("--source-lang", default="src")
    p.add_argument("--target-lang", default="tgt")
    p.set_defaults(fn=_cmd_tel_assemble)

    p = sub.add_parser("score", help="BLEU / chrF++ scoring")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--metric", choices=("bleu", "chrf++", "both"), default="both")
    p.set_defaults(fn=_cmd_score)

    p = sub.add_parser("stats", help="corpus counts by provenance")
    _add_corpus_io(p, output=False)
    p.set_defaults(fn=_cmd_stats)

    p = sub.add_parser("validate", help="validate a manifest")
    p.add_argument("manifest")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("run", help="run a manifest end to end")
    p.add_argument("manifest")
    p.set_defaults(fn=_cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (StageError, CorpusFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MtkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
