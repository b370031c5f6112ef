"""Dataset access for the uplink simulator's output layout.

A dataset root contains ``clean/<stem>.png`` plus one ``snr<S>_dop<D>/``
directory per operating point holding the received version of every
stem.  Pairs are (received, clean)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .config import DataError

POINT_RE = re.compile(r"^snr(?P<snr>-?[0-9.]+)_dop(?P<dop>[0-9.]+)$")


def load_tensor(path: Path) -> torch.Tensor:
    """PNG -> (3, H, W) float32 in [0, 1]."""
    arr = np.asarray(Image.open(path).convert("RGB"), dtype=np.float32)
    return torch.from_numpy(arr / 255.0).permute(2, 0, 1).contiguous()


def save_tensor(t: torch.Tensor, path: Path) -> None:
    """(3, H, W) float in [0, 1] -> PNG."""
    arr = (t.detach().clamp(0, 1) * 255.0).round().to(torch.uint8)
    Image.fromarray(arr.permute(1, 2, 0).cpu().numpy()).save(path)


@dataclass(frozen=True)
class PairRecord:
    stem: str
    snr_db: float
    doppler_hz: float
    noisy: Path
    clean: Path


def scan_dataset(root: str | Path, snr_max: float | None = None,
                 ) -> list[PairRecord]:
    root = Path(root)
    clean_dir = root / "clean"
    if not clean_dir.is_dir():
        raise DataError(f"no clean/ directory under {root}")
    clean = {p.stem: p for p in sorted(clean_dir.glob("*.png"))}
    if not clean:
        raise DataError(f"clean/ under {root} holds no PNG images")

    records: list[PairRecord] = []
    missing: list[str] = []
    for point in sorted(root.iterdir()):
        m = POINT_RE.match(point.name)
        if not point.is_dir() or m is None:
            continue
        snr = float(m.group("snr"))
        if snr_max is not None and snr > snr_max:
            continue
        dop = float(m.group("dop"))
        stems = {p.stem for p in point.glob("*.png")}
        for stem in sorted(clean):
            if stem in stems:
                records.append(PairRecord(stem, snr, dop,
                                          point / f"{stem}.png", clean[stem]))
            else:
                missing.append(f"{point.name}/{stem}")
    if missing:
        raise DataError("stems missing their received image: "
                        + ", ".join(missing))
    if not records:
        raise DataError(f"no operating-point directories under {root}")
    return records


class PairDataset(torch.utils.data.Dataset):
    """(noisy, clean) tensor pairs, optionally as aligned random crops."""

    def __init__(self, records: list[PairRecord], crop: int | None = None,
                 seed: int = 0):
        self.records = records
        self.crop = crop
        self.seed = seed
        self.epoch = 0

    def set_epoch(self, epoch: int) -> None:
        self.epoch = epoch

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, idx: int):
        rec = self.records[idx]
        noisy = load_tensor(rec.noisy)
        clean = load_tensor(rec.clean)
        if self.crop is not None:
            g = torch.Generator().manual_seed(
                hash((self.seed, self.epoch, idx)) & 0x7FFFFFFF)
            h, w = noisy.shape[-2:]
            if h < self.crop or w < self.crop:
                raise DataError(f"{rec.noisy} smaller than crop {self.crop}")
            i = int(torch.randint(0, h - self.crop + 1, (1,), generator=g))
            j = int(torch.randint(0, w - self.crop + 1, (1,), generator=g))
            noisy = noisy[:, i : i + self.crop, j : j + self.crop]
            clean = clean[:, i : i + self.crop, j : j + self.crop]
        return noisy, clean
