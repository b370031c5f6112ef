#!/usr/bin/env python3
"""Generate a directory of synthetic RGB test images.

Example:
    python3 scripts/make_test_images.py --out data/clean --count 16 --seed 2026
"""

import argparse
from pathlib import Path

from uavlink.synth import synthetic_image
from uavlink.transport import save_image


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, type=Path)
    ap.add_argument("--count", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--height", type=int, default=224)
    ap.add_argument("--width", type=int, default=224)
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        px = synthetic_image(args.seed + i, (args.height, args.width))
        save_image(px, args.out / f"img{i:02d}.png")
    print(f"wrote {args.count} images to {args.out}")


if __name__ == "__main__":
    main()
