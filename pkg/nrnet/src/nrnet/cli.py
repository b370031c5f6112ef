"""Command line: train a variant on a simulator dataset, or run a trained
checkpoint over a directory of PNGs."""

from __future__ import annotations

import argparse
import pickle
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, DataError, TrainConfig, VARIANTS
from .train import infer_dir, load_checkpoint, train_on_dataset


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 for usage problems
        raise UsageError(message)


def build_parser() -> _Parser:
    ap = _Parser(prog="nrnet", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="train a denoiser variant")
    tr.add_argument("--variant", choices=sorted(VARIANTS), default="v1")
    tr.add_argument("--data", required=True, type=Path,
                    help="dataset root in the simulator layout")
    tr.add_argument("--out", required=True, type=Path)
    tr.add_argument("--steps", type=int, default=500)
    tr.add_argument("--batch", type=int, default=4)
    tr.add_argument("--lr", type=float, default=1e-3)
    tr.add_argument("--crop", type=int, default=56)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--snr-max", type=float, default=None)
    # width overrides for CPU-sized runs (default: the preset's full size)
    tr.add_argument("--embed-dim", type=int, default=None)
    tr.add_argument("--heads", type=int, default=None)
    tr.add_argument("--cabs", type=int, default=None)
    tr.add_argument("--orbs", type=int, default=None)
    tr.add_argument("--depth", type=int, default=None)

    inf = sub.add_parser("infer", help="denoise a directory of PNGs")
    inf.add_argument("--checkpoint", required=True, type=Path)
    inf.add_argument("--in", dest="src", required=True, type=Path)
    inf.add_argument("--out", required=True, type=Path)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "train":
            tcfg = TrainConfig(lr=args.lr, batch_size=args.batch,
                               steps=args.steps,
                               crop=args.crop if args.crop > 0 else None,
                               seed=args.seed, snr_max=args.snr_max)
            vcfg = VARIANTS[args.variant]
            overrides = {k: v for k, v in (
                ("embed_dim", args.embed_dim), ("num_heads", args.heads),
                ("num_cab_per_orb", args.cabs), ("num_orb", args.orbs),
                ("sbl_depth", args.depth)) if v is not None}
            if overrides:
                vcfg = replace(vcfg, **overrides)
            summary = train_on_dataset(args.data, vcfg, tcfg, args.out,
                                       args.variant)
            for key, val in summary.items():
                print(f"{key}: {val}")
        else:
            if not args.src.is_dir():
                raise UsageError(f"not a directory: {args.src}")
            model, _ = load_checkpoint(args.checkpoint)
            n = infer_dir(model, args.src, args.out)
            print(f"denoised {n} images -> {args.out}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, DataError, OSError, ValueError, RuntimeError,
            KeyError, EOFError, pickle.UnpicklingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
