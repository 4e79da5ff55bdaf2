"""Command line wrapper: train a checkpoint, then emit predicted JSONL.

Exit codes: 0 success, 1 data/audio/IO failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .data import build_training_set
from .errors import AdapterError
from .inference import infer_boundaries
from .training import TrainConfig, finetune, load_checkpoint, save_checkpoint


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asr-adapter",
        description="Fine-tune a boundary recognizer and emit predicted-boundary JSONL.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="fine-tune on annotated audio")
    train.add_argument("--ref", required=True, help="reference annotation JSONL")
    train.add_argument("--audio", required=True, help="directory of <song_id>.wav files")
    train.add_argument("--lyrics", help="JSON file mapping song_id to transcript")
    train.add_argument("--config", help="TrainConfig JSON (defaults used if omitted)")
    train.add_argument("--out", required=True, help="checkpoint output path")
    train.set_defaults(func=cmd_train)

    dump = sub.add_parser("dump-config", help="write the default TrainConfig JSON")
    dump.add_argument("--out", required=True)
    dump.set_defaults(func=cmd_dump_config)

    infer = sub.add_parser("infer", help="predict boundaries for a directory of WAVs")
    infer.add_argument("--checkpoint", required=True)
    infer.add_argument("--audio", required=True)
    infer.add_argument("--out", required=True, help="predicted JSONL path")
    infer.add_argument("--category", default="unknown")
    infer.set_defaults(func=cmd_infer)
    return parser


def cmd_train(args) -> int:
    config = TrainConfig.load(args.config) if args.config else TrainConfig()
    training_set = build_training_set(args.ref, args.audio, lyrics=args.lyrics)
    result = finetune(training_set, config)
    save_checkpoint(args.out, result, training_set.tokenizer, config)
    best = result.best
    print(
        f"saved step {best.step} (val WER {best.val_wer:.3f}, "
        f"train loss {best.train_loss:.3f}) to {args.out}"
    )
    return 0


def cmd_dump_config(args) -> int:
    TrainConfig().dump(args.out)
    return 0


def cmd_infer(args) -> int:
    model, tokenizer = load_checkpoint(args.checkpoint)
    records = infer_boundaries(
        model, tokenizer, args.audio, out_path=args.out, category=args.category
    )
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AdapterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
