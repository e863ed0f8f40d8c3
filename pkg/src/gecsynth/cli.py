"""``gecsynth`` command line: corrupt, measure, filter, stats, clean, vocab.

Exit codes: 0 success, 1 input/output problem, 2 configuration problem.
Any long option can be defaulted from the environment as
``GECSYNTH_<OPTION>`` (e.g. ``GECSYNTH_SEED=3``, ``GECSYNTH_THREADS=8``).
Data goes to files (or stdout for reports); progress goes to stderr.
"""

from __future__ import annotations

import argparse
import gc
import json
import logging
import os
import sys
import time
from collections import Counter
from pathlib import Path

from . import __version__
from .alignment import COARSE_CODES, RateAccumulator, align, coarse_counts, pair_metrics
from .corpus_io import (
    CorpusFormatError,
    detect_format,
    format_tsv_line,
    read_m2,
    read_parallel_tsv,
    read_plain,
    read_vocab,
    write_m2,
    write_parallel_tsv,
    write_vocab,
)
from .corruptor import CorruptionConfig, CorruptionError, CorruptionStats, Corruptor, Sampling
from .filtering import FilterConfig, FilterError, TypeSource, filter_corpus, parse_type_ratio
from .parallel import default_workers
from .text_core import PunctuationSet, build_vocab, clean_pair

log = logging.getLogger("gecsynth")

ENV_PREFIX = "GECSYNTH_"


class ConfigError(Exception):
    """Bad flags or flag combinations (exit 2)."""


# -- helpers ----------------------------------------------------------------

def parse_ratio(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--ratio must look like M:U:R, got {text!r}")
    try:
        weights = tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"--ratio must be numeric, got {text!r}") from None
    return weights


def _input_format(path, fmt: str) -> str:
    return detect_format(path) if fmt == "auto" else fmt


def _load_pairs(path, fmt: str, annotator: int = 0):
    """Return (pairs, m2_entries or None)."""
    if fmt == "m2":
        entries = list(read_m2(path))
        return [e.to_pair(annotator) for e in entries], entries
    return list(read_parallel_tsv(path)), None


def _vocab_streams(paths):
    for path in paths:
        if Path(path).suffix.lower() == ".tsv":
            for pair in read_parallel_tsv(path):
                yield from pair.source
                yield from pair.target
        else:
            for toks in read_plain(path):
                yield from toks


def _manifest(args, summary: dict, inputs, outputs, started: float) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("func",)}
    return {
        "tool": "gecsynth",
        "version": __version__,
        "subcommand": args.command,
        "config": config,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "seed": getattr(args, "seed", None),
        "wall_time_s": round(time.time() - started, 6),
        "summary": summary,
    }


def _emit_manifest(args, manifest: dict, default_path=None) -> None:
    path = args.manifest or (f"{default_path}.manifest.json" if default_path else None)
    if path:
        text = json.dumps(manifest, indent=2, ensure_ascii=False, default=str) + "\n"
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stderr.write(json.dumps(manifest, ensure_ascii=False, default=str) + "\n")


def _write_report(report: dict, path, as_json: bool, render) -> None:
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n" if as_json else render(report)
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- subcommands ------------------------------------------------------------

def cmd_corrupt(args) -> dict:
    try:
        p_m, p_u, p_r = parse_ratio(args.ratio)
        config = CorruptionConfig(
            e_rate=args.error_rate, p_m=p_m, p_u=p_u, p_r=p_r, seed=args.seed,
            punctuation=PunctuationSet.parse(args.punct_set) if args.punct_set else PunctuationSet(),
            insertion_sampling=Sampling(args.insertion_sampling),
        )
    except (CorruptionError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if args.vocab and args.build_vocab_from:
        raise ConfigError("use either --vocab or --build-vocab-from, not both")

    if args.vocab:
        vocab = read_vocab(args.vocab)
    else:
        sources = args.build_vocab_from or [args.input]
        vocab = build_vocab([_vocab_streams(sources)])
    log.info("vocabulary: %d entries", len(vocab))

    corruptor = Corruptor(vocab, config)
    stats = CorruptionStats()
    gc.freeze()
    ops_fh = open(args.ops_out, "w", encoding="utf-8", newline="\n") if args.ops_out else None
    try:
        with open(args.output, "w", encoding="utf-8", newline="\n") as out:
            records = corruptor.corrupt_corpus(read_plain(args.input), threads=args.threads,
                                               skip_empty=args.skip_empty)
            for rec in records:
                out.write(format_tsv_line(rec.pair, args.output))
                if ops_fh:
                    ops_fh.write(json.dumps({"line": rec.line_index,
                                             "ops": [op.to_dict() for op in rec.applied_ops]},
                                            ensure_ascii=False) + "\n")
                stats.add(rec)
                if stats.sentences % 1_000_000 == 0:
                    log.info("%d sentences", stats.sentences)
    except CorruptionError as exc:
        raise CorpusFormatError(f"{args.input}: {exc}") from None
    finally:
        if ops_fh:
            ops_fh.close()
        gc.unfreeze()

    summary = stats.to_dict()
    summary["config"] = config.to_dict()
    summary["vocabulary_size"] = len(vocab)
    outputs = [args.output] + ([args.ops_out] if args.ops_out else [])
    log.info("corrupted %d sentences, %d events", stats.sentences, stats.total_events)
    return {"summary": summary, "inputs": [args.input], "outputs": outputs, "default": args.output}


def measure_pairs(pairs, type_source: TypeSource) -> dict:
    """Error rate, type counts and token totals for a list of pairs."""
    acc = RateAccumulator()
    types: Counter = Counter()
    src_tokens = 0
    for no, pair in enumerate(pairs, 1):
        if not pair.target:
            raise CorpusFormatError("zero-length correction", line=no)
        src_tokens += len(pair.source)
        if type_source is TypeSource.ALIGN:
            ops = align(pair.source, pair.target)
            acc.add(pair_metrics(pair))
            types.update(coarse_counts(ops))
        else:
            acc.add(pair_metrics(pair))
            types.update(e.type for e in pair.edits if not e.is_noop)
    if type_source is TypeSource.ALIGN:
        type_counts = {k: types.get(k, 0) for k in COARSE_CODES}
    else:
        type_counts = dict(sorted(types.items()))
    total = sum(type_counts.values())
    return {
        "pairs": acc.pairs,
        "source_tokens": src_tokens,
        "target_tokens": acc.length,
        "distance": acc.distance,
        "error_rate": acc.rate if acc.pairs else None,
        "type_source": type_source.value,
        "type_counts": type_counts,
        "type_ratio": {k: v / total for k, v in type_counts.items()} if total else {},
    }


def _render_measure(r: dict) -> str:
    lines = [
        f"pairs\t{r['pairs']}",
        f"source_tokens\t{r['source_tokens']}",
        f"target_tokens\t{r['target_tokens']}",
        f"distance\t{r['distance']}",
        f"error_rate\t{r['error_rate']:.6f}" if r["error_rate"] is not None else "error_rate\tNA",
    ]
    for k, v in r["type_counts"].items():
        share = r["type_ratio"].get(k, 0.0)
        lines.append(f"type\t{k}\t{v}\t{share:.4f}")
    return "\n".join(lines) + "\n"


def _check_type_source(args, fmt: str) -> TypeSource:
    ts = TypeSource(args.type_source)
    if ts is TypeSource.M2 and fmt != "m2":
        raise ConfigError("--type-source m2 requires M2 input")
    return ts


def cmd_measure(args) -> dict:
    fmt = _input_format(args.input, args.format)
    ts = _check_type_source(args, fmt)
    pairs, _ = _load_pairs(args.input, fmt, args.annotator)
    report = measure_pairs(pairs, ts)
    _write_report(report, args.output, args.json, _render_measure)
    outputs = [args.output] if args.output else []
    return {"summary": report, "inputs": [args.input], "outputs": outputs, "default": args.output}


def cmd_filter(args) -> dict:
    fmt = _input_format(args.input, args.format)
    ts = _check_type_source(args, fmt)
    if args.target_error_rate is None and not args.type_ratio:
        raise ConfigError("give --target-error-rate and/or --type-ratio")
    try:
        config = FilterConfig(
            target_e_rate=args.target_error_rate,
            theta=args.theta,
            type_ratio=parse_type_ratio(args.type_ratio) if args.type_ratio else None,
            type_source=ts,
            literal_balance=args.literal_balance,
            drop_empty_source=args.drop_empty_source,
        )
    except FilterError as exc:
        raise ConfigError(str(exc)) from None

    pairs, entries = _load_pairs(args.input, fmt, args.annotator)
    try:
        outcome = filter_corpus(pairs, config, threads=args.threads)
    except FilterError as exc:
        raise ConfigError(str(exc)) from None
    if entries is not None:
        write_m2((entries[i] for i in outcome.retained), args.output)
    else:
        write_parallel_tsv((pairs[i] for i in outcome.retained), args.output)

    report = outcome.report
    bal = report.get("balance")
    if bal and not bal["balanced"]:
        log.warning("could not balance types; residual over-quota: %s",
                    ", ".join(bal["residual_over_quota"]))
    if report.get("rate_floor_met") is False:
        log.warning("balancing left the error rate at %.4f, below the target floor",
                    report["after"]["error_rate"])
    report_path = args.report or f"{args.output}.report.json"
    Path(report_path).write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n",
                                 encoding="utf-8")
    log.info("kept %d of %d pairs", report["output_pairs"], report["input_pairs"])
    return {"summary": report, "inputs": [args.input], "outputs": [args.output, report_path],
            "default": args.output}


def _stats_one(path, fmt: str) -> dict:
    if fmt == "plain":
        n = toks = 0
        for s in read_plain(path):
            n += 1
            toks += len(s)
        return {"corpus": str(path), "sentences": n, "tokens": toks}
    pairs, _ = _load_pairs(path, fmt)
    return {
        "corpus": str(path),
        "sentences": len(pairs),
        "source_tokens": sum(len(p.source) for p in pairs),
        "target_tokens": sum(len(p.target) for p in pairs),
    }


def _render_stats(report: dict) -> str:
    lines = ["corpus\tsentences\ttokens"]
    for row in report["corpora"]:
        toks = row.get("tokens", row.get("target_tokens"))
        lines.append(f"{row['corpus']}\t{row['sentences']}\t{toks}")
    return "\n".join(lines) + "\n"


def cmd_stats(args) -> dict:
    rows = []
    for path in args.input:
        fmt = args.format
        if fmt == "auto":
            suffix = Path(path).suffix.lower()
            fmt = {".m2": "m2", ".tsv": "tsv"}.get(suffix, "plain")
        rows.append(_stats_one(path, fmt))
    report = {"corpora": rows}
    _write_report(report, args.output, args.json, _render_stats)
    outputs = [args.output] if args.output else []
    return {"summary": report, "inputs": args.input, "outputs": outputs, "default": args.output}


def cmd_clean(args) -> dict:
    fmt = _input_format(args.input, args.format)
    pairs, entries = _load_pairs(args.input, fmt, args.annotator)
    dropped: Counter = Counter()
    kept = []
    for i, pair in enumerate(pairs):
        decision = clean_pair(pair)
        if decision.keep:
            kept.append(i)
        else:
            dropped[decision.reason] += 1
    if entries is not None:
        write_m2((entries[i] for i in kept), args.output)
    else:
        write_parallel_tsv((pairs[i] for i in kept), args.output)
    report = {"input_pairs": len(pairs), "kept": len(kept), "dropped": dict(sorted(dropped.items()))}
    report_path = args.report or f"{args.output}.report.json"
    Path(report_path).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    log.info("kept %d of %d pairs", len(kept), len(pairs))
    return {"summary": report, "inputs": [args.input], "outputs": [args.output, report_path],
            "default": args.output}


def cmd_vocab(args) -> dict:
    vocab = build_vocab([_vocab_streams(args.input)])
    write_vocab(vocab, args.output)
    summary = {"entries": len(vocab), "tokens": vocab.total}
    return {"summary": summary, "inputs": args.input, "outputs": [args.output], "default": args.output}


# -- parser -----------------------------------------------------------------

def _threads(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("--threads must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_threads, default=default_workers(),
                        help="worker processes (default: available cores)")
    common.add_argument("--manifest", help="run manifest path (default: OUTPUT.manifest.json)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gecsynth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gecsynth {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corrupt", parents=[common], help="corrupt monolingual text into pairs")
    p.add_argument("-i", "--input", required=True, help="plain text, one sentence per line")
    p.add_argument("-o", "--output", required=True, help="parallel TSV: corrupted<TAB>original")
    p.add_argument("--error-rate", type=float, required=True)
    p.add_argument("--ratio", default="1:1:1", help="M:U:R operation weights")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--punct-set", help="whitespace-separated punctuation tokens")
    p.add_argument("--insertion-sampling", choices=[s.value for s in Sampling], default="uniform")
    p.add_argument("--vocab", help="vocabulary file (token<TAB>count)")
    p.add_argument("--build-vocab-from", nargs="+", metavar="FILE",
                   help="build the vocabulary from these corpora (.tsv counts both sides)")
    p.add_argument("--ops-out", help="JSON lines file of applied edit ops")
    p.add_argument("--skip-empty", action="store_true", help="skip blank input lines")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("measure", parents=[common], help="error rate and type counts")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    p.add_argument("--format", choices=["auto", "tsv", "m2"], default="auto")
    p.add_argument("--type-source", choices=[t.value for t in TypeSource], default="align")
    p.add_argument("--annotator", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("filter", parents=[common], help="raise error rate and balance types")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=["auto", "tsv", "m2"], default="auto")
    p.add_argument("--target-error-rate", type=float)
    p.add_argument("--type-ratio", help="e.g. M:1,U:1,R:1 or fine codes R:DET:1,M:PREP:1")
    p.add_argument("--theta", type=float, default=0.05)
    p.add_argument("--type-source", choices=[t.value for t in TypeSource], default="align")
    p.add_argument("--literal-balance", action="store_true",
                   help="literal-inequality balancer (for comparison only)")
    p.add_argument("--annotator", type=int, default=0)
    p.add_argument("--drop-empty-source", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--report", help="JSON report path (default: OUTPUT.report.json)")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("stats", parents=[common], help="sentence and token counts")
    p.add_argument("-i", "--input", required=True, nargs="+")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=["auto", "plain", "tsv", "m2"], default="auto")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("clean", parents=[common], help="drop uncorrected/URL/emoji/illegal pairs")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=["auto", "tsv", "m2"], default="auto")
    p.add_argument("--annotator", type=int, default=0)
    p.add_argument("--report", help="JSON report path (default: OUTPUT.report.json)")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("vocab", parents=[common], help="build a vocabulary file")
    p.add_argument("-i", "--input", required=True, nargs="+",
                   help="plain text corpora; .tsv files contribute both sides")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_vocab)

    _apply_env_defaults(sub)
    return parser


def _apply_env_defaults(subparsers_action) -> None:
    for sp in subparsers_action.choices.values():
        for action in sp._actions:
            long = [o for o in action.option_strings if o.startswith("--")]
            if not long or action.dest in ("help", "version"):
                continue
            env = ENV_PREFIX + long[0][2:].upper().replace("-", "_")
            if env not in os.environ:
                continue
            raw = os.environ[env]
            if isinstance(action, argparse.BooleanOptionalAction) or action.nargs == 0:
                value = raw.lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                try:
                    value = action.type(raw)
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise ConfigError(f"{env}={raw!r}: {exc}") from None
            elif action.nargs in ("+", "*"):
                value = raw.split()
            else:
                value = raw
            action.default = value
            action.required = False


def main(argv=None) -> int:
    try:
        parser = build_parser()
    except ConfigError as exc:
        print(f"gecsynth: error: {exc}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    started = time.time()
    try:
        result = args.func(args)
    except ConfigError as exc:
        print(f"gecsynth {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (CorpusFormatError, OSError) as exc:
        print(f"gecsynth {args.command}: error: {exc}", file=sys.stderr)
        return 1
    manifest = _manifest(args, result["summary"], result["inputs"], result["outputs"], started)
    _emit_manifest(args, manifest, result.get("default"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
