"""Command-line entry point: ``mdlphrase <command> ...``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from . import __version__, kernels
from .analysis import (
    RunStats,
    compare_long_frequent,
    compression_curve,
    length_distribution,
    near_duplicate_groups,
    term_vector,
    ward_cluster,
)
from .artifacts import (
    pattern_records,
    read_events,
    read_patterns,
    read_rules_csv,
    write_events,
    write_json,
    write_patterns,
    write_rows,
    grammar_to_dict,
    write_rules_csv,
)
from .encoding import EncodingError
from .miner import MiningConfig, TieBreak, mine
from .preprocess import (
    ConfigurationError,
    apply_placeholders,
    build_sequence,
    default_rules,
    frequency_table,
    load_rules,
    read_tokens,
    tokenize,
    write_tokens,
)
from .sequitur import expand_rules, sequitur_mine
from .synth import PlantSpec, planted_corpus, random_corpus, zipf_corpus

log = logging.getLogger("mdlphrase")

EXIT_USAGE = 1
EXIT_DATA = 2


class DataError(Exception):
    """Input data is unreadable, empty or malformed."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- preprocess ---------------------------------------------------------------


def _input_files(paths: Sequence[str]) -> list[Path]:
    files: list[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files.extend(sorted(p for p in path.iterdir() if p.is_file() and p.suffix == ".txt"))
        elif path.is_file():
            files.append(path)
        else:
            raise DataError(f"no such input: {path}")
    return files


def _preprocess_one(src: Path, outdir: Path, rules, lowercase: bool, one_per_line: bool) -> Path:
    try:
        text = src.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {src}: {exc}") from exc
    if rules:
        text = apply_placeholders(text, rules)
    tokens = tokenize(text, lowercase=lowercase)
    dest = outdir / f"{src.stem}.tokens"
    write_tokens(dest, tokens, one_per_line=one_per_line)
    write_json(outdir / f"{src.stem}.vocab.json", frequency_table(build_sequence(tokens)))
    return dest


def cmd_preprocess(args) -> int:
    if args.no_placeholders:
        rules = []
    elif args.rules:
        rules = load_rules(args.rules)
    else:
        rules = default_rules()
    files = _input_files(args.inputs)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    job = dict(outdir=outdir, rules=rules, lowercase=not args.no_lowercase,
               one_per_line=args.format == "lines")
    if args.jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            outs = list(pool.map(_preprocess_kw, [(f, job) for f in files]))
    else:
        outs = [_preprocess_one(f, **job) for f in files]
    for out in outs:
        print(out)
    return 0


def _preprocess_kw(item):
    src, job = item
    return _preprocess_one(src, **job)


# -- mine / sequitur ------------------------------------------------------------


def _load_sequence(path: str):
    try:
        tokens = read_tokens(path)
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read token file {path}: {exc}") from exc
    if not tokens:
        raise DataError(f"empty corpus: {path}")
    return build_sequence(tokens)


def _run_mine(tokens_path: str, config: MiningConfig, outdir: Path, min_length: int, min_freq: int) -> RunStats:
    seq = _load_sequence(tokens_path)
    result = mine(seq, config)
    records = pattern_records(result)
    outdir.mkdir(parents=True, exist_ok=True)
    write_patterns(outdir / "patterns.json", records)
    write_events(outdir / "events.csv", result.events)
    stats = RunStats.from_result(result, corpus=Path(tokens_path).stem, backend=kernels.BACKEND)
    stats.extra = {
        "min_length": min_length,
        "min_frequency": min_freq,
        "long_frequent": sum(
            r.length >= min_length and r.occurrences >= min_freq for r in records
        ),
    }
    write_json(outdir / "stats.json", asdict(stats))
    return stats


def _config(args, failures: int | None = None) -> MiningConfig:
    return MiningConfig(
        failure_budget=failures if failures is not None else args.failures,
        max_steps=args.max_steps,
        tie_break=TieBreak(args.tie_break),
    )


def cmd_mine(args) -> int:
    stats = _run_mine(args.tokens, _config(args), Path(args.output), args.min_length, args.min_freq)
    print(
        f"{stats.n_patterns} patterns, {stats.accepted} accepted / {stats.pruned} pruned / "
        f"{stats.rejected} rejected, compression {stats.compression_percent:.2f}% "
        f"in {stats.wall_time:.2f}s ({stats.stop_reason})"
    )
    return 0


def cmd_sweep(args) -> int:
    """Failure-budget sensitivity: one (runtime, compression) record per budget."""
    outdir = Path(args.output)
    rows = []
    for f in args.failures:
        stats = _run_mine(args.tokens, _config(args, f), outdir / f"f{f}", args.min_length, args.min_freq)
        rows.append([stats.corpus, f, stats.wall_time, stats.compression_percent,
                     stats.steps, stats.n_patterns, stats.stop_reason])
        print(f"f={f}: {stats.compression_percent:.2f}% in {stats.wall_time:.2f}s")
    write_rows(outdir / "sweep.csv",
               ["corpus", "failures", "wall_time", "compression_percent", "steps", "n_patterns", "stop_reason"],
               rows)
    return 0


def cmd_sequitur(args) -> int:
    seq = _load_sequence(args.tokens)
    started = time.perf_counter()
    grammar = sequitur_mine(seq)
    expanded = expand_rules(grammar)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    write_json(outdir / "grammar.json", grammar_to_dict(grammar, seq.vocabulary))
    write_rules_csv(outdir / "rules.csv", expanded, seq.vocabulary)
    print(f"{len(expanded)} rules in {time.perf_counter() - started:.2f}s")
    return 0


# -- compare / analyze ----------------------------------------------------------


def cmd_compare(args) -> int:
    try:
        patterns = read_patterns(args.patterns)
        rules = read_rules_csv(args.rules)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DataError(f"cannot read artifacts: {exc}") from exc
    record = compare_long_frequent(
        [(p.length, p.occurrences) for p in patterns],
        [(r["length"], r["usage"]) for r in rules],
        args.min_length,
        args.min_freq,
    )
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_rows(
        out,
        ["method", "min_length", "min_frequency", "qualifying", "total"],
        [
            ["mdl", record.min_length, record.min_frequency, record.mdl_qualifying, record.mdl_total],
            ["sequitur", record.min_length, record.min_frequency, record.sequitur_qualifying,
             record.sequitur_total],
        ],
    )
    print(f"long and frequent: mdl {record.mdl_qualifying}, sequitur {record.sequitur_qualifying}")
    return 0


def cmd_analyze(args) -> int:
    try:
        patterns = read_patterns(args.patterns)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DataError(f"cannot read {args.patterns}: {exc}") from exc
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)

    vectors = [term_vector(p.id, p.expansion, skip_placeholders=args.skip_placeholders) for p in patterns]
    vectors = [v for v in vectors if v.counts]
    tree = ward_cluster(vectors, cut=args.cut)
    write_json(outdir / "clusters.json", {
        "cut": args.cut,
        "assignments": {str(pid): lab for pid, lab in zip(tree.ids, tree.labels)},
        "clusters": tree.clusters(),
        "merges": [[int(a), int(b), float(d), int(n)] for a, b, d, n in tree.merges.tolist()],
    })

    groups = near_duplicate_groups({p.id: p.expansion for p in patterns}, args.max_edit)
    write_json(outdir / "groups.json", {
        "max_distance": args.max_edit,
        "groups": [g for g in groups if len(g) > 1],
    })

    lengths = [p.length for p in patterns]
    hist: dict[int, int] = {}
    for n in lengths:
        hist[n] = hist.get(n, 0) + 1
    write_rows(outdir / "histogram.csv", ["length", "count"], sorted(hist.items()))
    summary = length_distribution(lengths, args.min_length)
    write_json(outdir / "length_summary.json", {"min_length": args.min_length, **summary})

    events_path = Path(args.events) if args.events else Path(args.patterns).with_name("events.csv")
    curve = []
    if events_path.exists():
        curve = compression_curve(read_events(events_path))
    write_rows(outdir / "curve.csv", ["step", "compression_percent"], curve)

    if args.svg:
        from .plots import render_svgs

        render_svgs(outdir, [n for n in lengths if n >= args.min_length], curve)
    print(f"{len(tree.clusters())} clusters, {sum(len(g) > 1 for g in groups)} near-duplicate groups")
    return 0


# -- synth --------------------------------------------------------------------


def cmd_synth(args) -> int:
    if args.kind == "planted":
        spec = PlantSpec(
            phrase_len=args.phrase_len,
            repeats=args.repeats,
            noise_tokens=args.noise,
            noise_vocab=args.noise_vocab,
            phrases=args.phrases,
            total_length=args.total_length,
            seed=args.seed,
        )
        try:
            tokens = planted_corpus(spec)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc
    elif args.kind == "zipf":
        tokens = zipf_corpus(n_tokens=args.total_length or 50_000, vocab=args.noise_vocab, seed=args.seed)
    else:
        tokens = random_corpus(args.total_length or args.noise, args.noise_vocab, seed=args.seed)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_tokens(out, tokens)
    print(f"{len(tokens)} tokens -> {out}")
    return 0


# -- wiring -------------------------------------------------------------------


def _add_mining_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--failures", type=_positive, default=10_000,
                   help="stop after this many rejected candidates (default: 10000)")
    p.add_argument("--max-steps", type=int, default=None, help="stop after this many accepted patterns")
    p.add_argument("--tie-break", choices=[t.value for t in TieBreak], default=TieBreak.COUNT.value)
    _add_report_flags(p)


def _add_report_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--min-length", type=int, default=5, help="reporting only (default: 5)")
    p.add_argument("--min-freq", type=int, default=10, help="reporting only (default: 10)")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mdlphrase", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("preprocess", help="placeholder substitution and tokenization")
    p.add_argument("inputs", nargs="+", help="text files or directories of .txt files")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--rules", help="placeholder rule file (default: $MDLPHRASE_RULES or bundled rules)")
    p.add_argument("--no-placeholders", action="store_true")
    p.add_argument("--no-lowercase", action="store_true")
    p.add_argument("--format", choices=["lines", "spaces"], default="lines")
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("mine", help="mine a pattern set from a token file")
    p.add_argument("tokens")
    p.add_argument("-o", "--output", required=True, help="output directory")
    _add_mining_flags(p)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("sweep", help="mine under several failure budgets")
    p.add_argument("tokens")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--failures", type=_positive, nargs="+", default=[1_000, 10_000, 50_000, 100_000])
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--tie-break", choices=[t.value for t in TieBreak], default=TieBreak.COUNT.value)
    _add_report_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sequitur", help="token-level Sequitur baseline")
    p.add_argument("tokens")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_sequitur)

    p = sub.add_parser("compare", help="count long and frequent phrases per method")
    p.add_argument("--patterns", required=True, help="patterns.json from 'mine'")
    p.add_argument("--rules", required=True, help="rules.csv from 'sequitur'")
    p.add_argument("-o", "--output", required=True, help="comparison CSV path")
    _add_report_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("analyze", help="clusters, near duplicates, length and compression reports")
    p.add_argument("patterns")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--events", help="events.csv (default: next to patterns.json)")
    p.add_argument("--cut", type=float, default=0.5, help="Ward distance cut (default: 0.5)")
    p.add_argument("--max-edit", type=int, default=2, help="token edit distance for grouping (default: 2)")
    p.add_argument("--min-length", type=int, default=5)
    p.add_argument("--skip-placeholders", action="store_true", help="leave {label} tokens out of term vectors")
    p.add_argument("--svg", action="store_true", help="also render SVG figures (needs matplotlib)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="generate a synthetic token file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--kind", choices=["planted", "zipf", "random"], default="planted")
    p.add_argument("--phrase-len", type=int, default=8)
    p.add_argument("--repeats", type=int, default=50)
    p.add_argument("--phrases", type=int, default=1)
    p.add_argument("--noise", type=int, default=2000)
    p.add_argument("--noise-vocab", type=int, default=100)
    p.add_argument("--total-length", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"mdlphrase: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, EncodingError) as exc:
        print(f"mdlphrase: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
