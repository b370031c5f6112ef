#!/usr/bin/env python3
"""Transmit a directory of images over the simulated uplink at several
SNR / Doppler operating points and write the received dataset.

Example:
    python3 scripts/run_sweep.py --in data/clean --out data/sweep \
        --snr 1 3 5 10 20 --doppler 300 --seed 0
"""

import argparse
import time
from pathlib import Path

from uavlink.link import read_manifest, sweep
from uavlink.transport import load_image


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--in", dest="src", required=True, type=Path)
    ap.add_argument("--out", required=True, type=Path)
    ap.add_argument("--snr", type=float, nargs="+",
                    default=[1, 2, 3, 4, 5, 6, 10, 15, 18, 20])
    ap.add_argument("--doppler", type=float, nargs="+", default=[300.0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    exts = {".png", ".jpg", ".jpeg", ".bmp"}
    paths = sorted(p for p in args.src.iterdir()
                   if p.suffix.lower() in exts)
    if not paths:
        raise SystemExit(f"no images found in {args.src}")
    images = [load_image(p) for p in paths]

    t0 = time.monotonic()
    rows = sweep(images, args.snr, args.doppler, args.seed, args.out,
                 workers=args.workers)
    dt = time.monotonic() - t0
    print(f"{len(rows)} transmissions in {dt:.1f}s -> {args.out}")
    for row in read_manifest(args.out / "manifest.csv")[:5]:
        print("   ", row)


if __name__ == "__main__":
    main()
