"""Command-line interface: dataset generation, denoising, evaluation.

Exit codes: 0 success, 1 usage error, 2 runtime failure.

    uavlink generate --in clean_dir --out dataset [--snr 1,5,10] \
        [--doppler 300] [--seed 0] [--workers 2] [--config file]
    uavlink denoise --in dataset --method bm3d [--sigma 25] [--out dir]
    uavlink evaluate --in dataset [--out metrics.csv]

`generate` writes dataset/snr{S}_dop{D}/{stem}.png for every point, clean
copies under dataset/clean/, and dataset/manifest.csv.  `denoise` filters
every noisy point into dataset/denoised_{method}/...  `evaluate` scores
noisy and denoised trees against the clean copies.

Config files are flat `key = value` lines (# comments); command-line
flags override file values.  Recognized keys: seed, snr_list,
doppler_list, workers, max_harq_retx, ldpc_max_iter, method, sigma.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import metrics
from .denoise import FILTERS
from .link import PSNR_CAP_DB, read_manifest, sweep
from .transport import ImagePayload, load_image, save_image

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp"}
_DEFAULT_SNR = (1, 2, 3, 4, 5, 6, 10, 15, 18, 20)
_DEFAULT_DOPPLER = (300,)

_CONFIG_KEYS = {
    "seed": int,
    "snr_list": "floats",
    "doppler_list": "floats",
    "workers": int,
    "max_harq_retx": int,
    "ldpc_max_iter": int,
    "method": str,
    "sigma": float,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage problems, not argparse's 2
        raise UsageError(message)


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.replace(" ", "").split(",") if v)
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc
    if not values:
        raise UsageError("empty number list")
    return values


def load_config(path: str | Path) -> dict:
    """Flat key=value config; unknown keys are usage errors."""
    out: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        kind = _CONFIG_KEYS[key]
        if kind == "floats":
            out[key] = _parse_floats(value)
        else:
            try:
                out[key] = kind(value)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: bad value for {key}") from exc
    return out


def _load_clean_dir(path: Path) -> list[ImagePayload]:
    if not path.is_dir():
        raise UsageError(f"input directory not found: {path}")
    images = [load_image(p) for p in sorted(path.iterdir())
              if p.suffix.lower() in _IMAGE_SUFFIXES]
    if not images:
        raise UsageError(f"no images in {path}")
    return images


def _cmd_generate(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    snr = _parse_floats(args.snr) if args.snr else cfg.get("snr_list", _DEFAULT_SNR)
    dop = (_parse_floats(args.doppler) if args.doppler
           else cfg.get("doppler_list", _DEFAULT_DOPPLER))
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    workers = args.workers if args.workers is not None else cfg.get("workers", 1)
    images = _load_clean_dir(Path(args.in_path))
    rows = sweep(
        images, snr, dop, seed, args.out,
        workers=workers,
        max_harq_retx=cfg.get("max_harq_retx", 0),
        ldpc_max_iter=cfg.get("ldpc_max_iter", 20),
    )
    print(f"wrote {len(rows)} points to {args.out}")
    return 0


def _point_dirs(root: Path) -> list[Path]:
    return sorted(p for p in root.iterdir()
                  if p.is_dir() and p.name.startswith("snr"))


def _cmd_denoise(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    method = args.method or cfg.get("method")
    if method not in FILTERS:
        raise UsageError(f"--method must be one of {sorted(FILTERS)}")
    sigma = args.sigma if args.sigma is not None else cfg.get("sigma")
    fn = FILTERS[method]
    src = Path(args.in_path)

    if src.is_file():
        if not args.out:
            raise UsageError("--out is required when denoising a single file")
        img = load_image(src)
        save_image(fn(img.pixels, sigma=sigma), args.out)
        print(f"wrote {args.out}")
        return 0

    if not src.is_dir():
        raise UsageError(f"input not found: {src}")
    out_root = Path(args.out) if args.out else src / f"denoised_{method}"
    count = 0
    for point in _point_dirs(src):
        dest = out_root / point.name
        dest.mkdir(parents=True, exist_ok=True)
        for png in sorted(point.glob("*.png")):
            img = load_image(png)
            save_image(fn(img.pixels, sigma=sigma), dest / png.name)
            count += 1
    if not count:
        raise UsageError(f"no noisy points under {src}")
    print(f"denoised {count} images into {out_root}")
    return 0


def _cmd_evaluate(args) -> int:
    root = Path(args.in_path)
    clean_dir = root / "clean"
    if not clean_dir.is_dir():
        raise UsageError(f"{root} has no clean/ directory")
    clean = {p.stem: load_image(p).pixels for p in sorted(clean_dir.glob("*.png"))}
    if not clean:
        raise UsageError("no clean images found")

    variants: list[tuple[str, Path]] = [("noisy", root)]
    for d in sorted(root.glob("denoised_*")):
        if d.is_dir():
            variants.append((d.name.removeprefix("denoised_"), d))

    rows = []
    for variant, vroot in variants:
        for point in _point_dirs(vroot):
            for png in sorted(point.glob("*.png")):
                ref = clean.get(png.stem)
                if ref is None:
                    continue
                img = load_image(png).pixels
                rows.append({
                    "variant": variant,
                    "point": point.name,
                    "image_stem": png.stem,
                    "psnr": f"{min(metrics.psnr(ref, img), PSNR_CAP_DB):.4f}",
                    "ssim": f"{metrics.ssim(ref, img):.6f}",
                })
    if not rows:
        raise RuntimeError("nothing to evaluate")

    out = Path(args.out) if args.out else root / "metrics.csv"
    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=("variant", "point", "image_stem", "psnr", "ssim"))
        writer.writeheader()
        writer.writerows(rows)

    summary: dict[tuple[str, str], list[float]] = {}
    for r in rows:
        summary.setdefault((r["variant"], r["point"]), []).append(float(r["psnr"]))
    for (variant, point), vals in sorted(summary.items()):
        print(f"{variant:>8s} {point:<16s} mean PSNR {np.mean(vals):6.2f} dB "
              f"({len(vals)} images)")
    print(f"wrote {out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="uavlink", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--in", dest="in_path", required=True)
        p.add_argument("--out")

    gen = sub.add_parser("generate", help="transmit images over the link")
    common(gen)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--snr", help="comma-separated SNR list in dB")
    gen.add_argument("--doppler", help="comma-separated Doppler list in Hz")
    gen.add_argument("--workers", type=int)
    gen.set_defaults(fn=_cmd_generate)

    den = sub.add_parser("denoise", help="filter a dataset or one image")
    common(den)
    den.add_argument("--method", choices=sorted(FILTERS))
    den.add_argument("--sigma", type=float)
    den.set_defaults(fn=_cmd_denoise)

    ev = sub.add_parser("evaluate", help="score noisy/denoised trees")
    common(ev)
    ev.set_defaults(fn=_cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "generate" and not args.out:
            raise UsageError("generate requires --out")
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit:
        raise
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
