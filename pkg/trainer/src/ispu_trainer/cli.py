"""Trainer command line: train-float / train-binary."""

import argparse
import sys

from .train import TrainConfig, train_binary, train_float


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ispu-trainer",
        description="Train activity-recognition MLPs on feature CSVs and "
                    "export portable .ispu-model files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in (("train-float", train_float), ("train-binary", train_binary)):
        p = sub.add_parser(name)
        p.add_argument("--arch", required=True,
                       help="architecture name, e.g. Float_1,32 or Binary_2,64")
        p.add_argument("--data", required=True,
                       help="labeled feature CSV (f00..f29,window_index,label)")
        p.add_argument("--out", required=True, help="output .ispu-model path")
        p.add_argument("--epochs", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--splits", default="0.7,0.15,0.15",
                       help="train,validation,test ratios")
        p.add_argument("--lr", type=float, default=1e-3)
        p.add_argument("--batch-size", type=int, default=32)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = TrainConfig(
            arch=args.arch,
            data_path=args.data,
            out_path=args.out,
            epochs=args.epochs,
            seed=args.seed,
            splits=tuple(float(v) for v in args.splits.split(",")),
            learning_rate=args.lr,
            batch_size=args.batch_size,
        )
        summary = args.func(config)
    except (ValueError, OSError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2
    print(
        f"{summary['arch']}: validation {summary['val_accuracy']:.4f}, "
        f"test {summary['test_accuracy']:.4f}, "
        f"export agreement {summary['export_agreement']:.4f} -> {summary['out_path']}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
