"""Command-line interface wiring the library into batch workflows.

Exit codes: 0 success, 1 validation or data error, 2 usage error,
3 numerical failure. Diagnostics go to stderr; results go to stdout or
the requested output file. Given identical inputs, flags, and seeds,
every subcommand produces byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .annotations import Corpus, parse_annotations, write_annotations
from .errors import AudioFormatError, NumericalError, ParseError, ValidationError
from .evaluation import (
    DEFAULT_FOLDS,
    DEFAULT_TOLERANCE_S,
    evaluate_corpus,
    report_csv,
    stratified_folds,
)
from .features import (
    DEFAULT_BIN_WIDTH,
    DEFAULT_WINDOW_S,
    extract_features,
    features_from_csv,
    features_to_csv,
)
from .manova import manova, omnibus_csv, posthoc_csv, report_json, report_text
from .segmenter import SegmenterConfig, segment_file
from .synthesis import (
    JitterSpec,
    default_profiles,
    generate_corpus,
    jitter_corpus,
    read_profiles,
    write_profiles,
)
from ._fmt import csv_field, fmt_num

# group count of the reference analysis the default flags reproduce; a
# differing count in the data is worth a visible note
DEFAULT_EXPECT_GROUPS = 8


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, AudioFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motifkit",
        description="Corpus analysis of motif-boundary annotations: "
        "evaluation, windowed structural features, MANOVA, synthesis, "
        "and a baseline audio segmenter.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="score predicted boundaries against references")
    p.add_argument("--ref", required=True, help="reference annotation JSONL")
    p.add_argument("--pred", required=True, help="predicted annotation JSONL")
    p.add_argument(
        "--tolerance",
        type=float,
        default=DEFAULT_TOLERANCE_S,
        help="match tolerance in seconds (default %(default)s)",
    )
    p.add_argument(
        "--group-by",
        choices=("none", "category", "fold"),
        default="none",
        help="report row granularity (default %(default)s)",
    )
    p.add_argument(
        "--folds",
        type=int,
        default=DEFAULT_FOLDS,
        help="fold count for --group-by fold (default %(default)s)",
    )
    p.add_argument("--seed", type=int, default=0, help="fold shuffling seed")
    p.add_argument(
        "--aggregate",
        choices=("macro", "micro"),
        default="macro",
        help="per-song mean (macro) or pooled counts (micro)",
    )
    p.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="report format"
    )
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("features", help="windowed structural features as CSV")
    p.add_argument("--ann", required=True, help="annotation JSONL")
    p.add_argument(
        "--window",
        type=float,
        default=DEFAULT_WINDOW_S,
        help="window length in seconds (default %(default)s)",
    )
    p.add_argument(
        "--bin-width",
        type=float,
        default=DEFAULT_BIN_WIDTH,
        help="log2-duration histogram bin width (default %(default)s)",
    )
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("manova", help="one-way MANOVA over a feature table")
    p.add_argument("--features", required=True, help="feature CSV path")
    p.add_argument(
        "--posthoc",
        choices=("holm", "none"),
        default="holm",
        help="p-value adjustment for the pairwise table",
    )
    p.add_argument(
        "--per-song",
        action="store_true",
        help="average each song's windows into one observation",
    )
    p.add_argument(
        "--expect-groups",
        type=int,
        default=DEFAULT_EXPECT_GROUPS,
        help="note in the report when the group count differs "
        "(default %(default)s; 0 disables the check)",
    )
    p.add_argument(
        "--format",
        choices=("text", "csv", "json"),
        default="text",
        help="report format (csv emits the omnibus table, a blank line, "
        "then the pairwise table)",
    )
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_manova)

    p = sub.add_parser("simulate", help="generate a synthetic annotated corpus")
    p.add_argument(
        "--profiles",
        help="profile JSON (default: built-in seven-category profiles)",
    )
    p.add_argument(
        "--songs-per-category", type=int, default=20, help="songs per profile"
    )
    p.add_argument("--seed", type=int, default=0, help="generation seed")
    p.add_argument(
        "--jitter",
        metavar="SIGMA,DROP,INSERT",
        help="also emit a degraded predicted corpus "
        "(Gaussian sigma seconds, drop and insert probabilities)",
    )
    p.add_argument(
        "--out",
        metavar="REF[,PRED]",
        help="reference output path, plus predicted path when --jitter is set",
    )
    p.add_argument(
        "--dump-profiles",
        metavar="PATH",
        help="write the built-in profile file to PATH and exit",
    )
    p.set_defaults(func=cmd_simulate, parser=p)

    p = sub.add_parser("segment", help="silence-based segmentation of WAV files")
    p.add_argument("--audio", required=True, help="directory of .wav files")
    p.add_argument(
        "--method", choices=("energy",), default="energy", help="segmentation method"
    )
    p.add_argument("--frame", type=float, default=0.025, help="frame length, seconds")
    p.add_argument("--hop", type=float, default=0.010, help="hop length, seconds")
    p.add_argument(
        "--threshold-ratio",
        type=float,
        default=0.25,
        help="silence threshold as a fraction of median frame RMS",
    )
    p.add_argument(
        "--min-silence", type=float, default=0.3, help="minimum silent run, seconds"
    )
    p.add_argument(
        "--category",
        default="unknown",
        help="category label stamped on emitted records",
    )
    p.add_argument("--out", required=True, help="predicted annotation JSONL path")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser(
        "plot-data", help="scatter-plot rows (points plus per-category centroids)"
    )
    p.add_argument("--features", required=True, help="feature CSV path")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_plot_data)

    return parser


def cmd_eval(args: argparse.Namespace) -> int:
    ref = parse_annotations(Path(args.ref).read_text(encoding="utf-8"))
    pred = parse_annotations(Path(args.pred).read_text(encoding="utf-8"))
    folds = None
    if args.group_by == "fold":
        folds = stratified_folds(ref, args.folds, args.seed)
    summaries = evaluate_corpus(
        ref,
        pred,
        tolerance_s=args.tolerance,
        group_by=args.group_by,
        folds=folds,
        aggregate=args.aggregate,
    )
    if args.format == "csv":
        text = report_csv(summaries)
    else:
        text = json.dumps(
            {"groups": [asdict(s) for s in summaries]}, sort_keys=True
        ) + "\n"
    _write_output(args.out, text)
    return 0


def cmd_features(args: argparse.Namespace) -> int:
    corpus = parse_annotations(Path(args.ann).read_text(encoding="utf-8"))
    table = extract_features(corpus, window_len_s=args.window, bin_width=args.bin_width)
    covered = {row.song_id for row in table}
    for rec in corpus:
        if rec.song_id not in covered:
            print(
                f"warning: song {rec.song_id!r} ({fmt_num(rec.duration_s)} s) "
                f"contains no complete {fmt_num(args.window)} s window; no rows emitted",
                file=sys.stderr,
            )
    _write_output(args.out, features_to_csv(table))
    return 0


def cmd_manova(args: argparse.Namespace) -> int:
    table = features_from_csv(Path(args.features).read_text(encoding="utf-8"))
    expect = args.expect_groups if args.expect_groups > 0 else None
    report = manova(
        table,
        per_song=args.per_song,
        posthoc=args.posthoc,
        expect_groups=expect,
    )
    if args.format == "text":
        text = report_text(report)
    elif args.format == "json":
        text = report_json(report)
    else:
        text = omnibus_csv(report) + "\n" + posthoc_csv(report)
    _write_output(args.out, text)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.dump_profiles:
        _write_output(args.dump_profiles, write_profiles(default_profiles()))
        return 0
    if not args.out:
        args.parser.error("simulate requires --out (or --dump-profiles)")
    out_paths = args.out.split(",")
    if args.jitter and len(out_paths) != 2:
        args.parser.error("--jitter needs --out ref.jsonl,pred.jsonl")
    if not args.jitter and len(out_paths) != 1:
        args.parser.error("--out lists two paths but --jitter is not set")
    if args.profiles:
        profiles = read_profiles(Path(args.profiles).read_text(encoding="utf-8"))
    else:
        profiles = default_profiles()
    # one root: the reference corpus is the same with or without --jitter
    gen_seed, jitter_seed = np.random.SeedSequence(args.seed).spawn(2)
    corpus = generate_corpus(profiles, args.songs_per_category, gen_seed)
    _write_output(out_paths[0], write_annotations(corpus))
    if args.jitter:
        spec = _parse_jitter(args.jitter, args.parser)
        predicted = jitter_corpus(corpus, spec, jitter_seed)
        _write_output(out_paths[1], write_annotations(predicted))
    return 0


def cmd_segment(args: argparse.Namespace) -> int:
    config = SegmenterConfig(
        frame_s=args.frame,
        hop_s=args.hop,
        threshold_ratio=args.threshold_ratio,
        min_silence_s=args.min_silence,
    )
    audio_dir = Path(args.audio)
    if not audio_dir.is_dir():
        raise ValidationError(f"not a directory: {audio_dir}")
    paths = sorted(
        p for p in audio_dir.iterdir() if p.suffix.lower() == ".wav" and p.is_file()
    )
    records = [segment_file(p, config, category=args.category) for p in paths]
    _write_output(args.out, write_annotations(Corpus(tuple(records))))
    return 0


def cmd_plot_data(args: argparse.Namespace) -> int:
    table = features_from_csv(Path(args.features).read_text(encoding="utf-8"))
    lines = ["row_type,category,motif_count,duration_entropy_bits"]
    by_category: dict[str, list[tuple[float, float]]] = {}
    for row in table:
        by_category.setdefault(row.category, []).append(
            (row.motif_count, row.duration_entropy_bits)
        )
        lines.append(
            f"point,{csv_field(row.category)},"
            f"{fmt_num(row.motif_count)},{row.duration_entropy_bits!r}"
        )
    # same reduction as the MANOVA group means, so centroids agree exactly
    for category in sorted(by_category):
        mean = np.array(by_category[category], dtype=float).mean(axis=0)
        lines.append(
            f"centroid,{csv_field(category)},"
            f"{float(mean[0])!r},{float(mean[1])!r}"
        )
    _write_output(args.out, "\n".join(lines) + "\n")
    return 0


def _parse_jitter(text: str, parser: argparse.ArgumentParser) -> JitterSpec:
    parts = text.split(",")
    if len(parts) != 3:
        parser.error("--jitter expects sigma,drop,insert")
    try:
        sigma, drop, insert = (float(v) for v in parts)
    except ValueError:
        parser.error(f"--jitter expects three numbers, got {text!r}")
    return JitterSpec(sigma_s=sigma, p_drop=drop, p_insert=insert)


def _write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
