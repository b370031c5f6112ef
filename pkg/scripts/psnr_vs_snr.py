#!/usr/bin/env python3
"""Aggregate a sweep manifest (and any metrics.csv from `uavlink evaluate`)
into a per-SNR mean-PSNR table.

Example:
    python3 scripts/psnr_vs_snr.py data/sweep
"""

import argparse
import csv
from collections import defaultdict
from pathlib import Path
from statistics import mean

from uavlink.link import read_manifest


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("root", type=Path, help="sweep output directory")
    args = ap.parse_args()

    table: dict[tuple[str, float], list[float]] = defaultdict(list)

    for row in read_manifest(args.root / "manifest.csv"):
        table[("noisy", float(row["snr_db"]))].append(
            float(row["psnr_vs_clean"]))

    metrics_csv = args.root / "metrics.csv"
    if metrics_csv.exists():
        with open(metrics_csv, newline="") as fh:
            for row in csv.DictReader(fh):
                snr = float(row["point"].split("_")[0].removeprefix("snr"))
                table[(row["variant"], snr)].append(float(row["psnr"]))

    variants = sorted({v for v, _ in table})
    snrs = sorted({s for _, s in table})
    head = "snr_db".ljust(8) + "".join(v.rjust(14) for v in variants)
    print(head)
    print("-" * len(head))
    for s in snrs:
        cells = []
        for v in variants:
            vals = table.get((v, s))
            cells.append(f"{mean(vals):14.2f}" if vals else " " * 14)
        print(f"{s:<8g}" + "".join(cells))


if __name__ == "__main__":
    main()
