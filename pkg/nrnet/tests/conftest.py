from __future__ import annotations

import shutil
import subprocess

import numpy as np
import pytest
import torch
from PIL import Image

from nrnet.config import VariantConfig

torch.set_num_threads(1)

# CPU-sized network used by every forward/backward test; same topology as
# the shipped presets, just narrower.
REDUCED = VariantConfig(sbl_in_encoder=True, sbl_in_decoder=True,
                        use_ssim_loss=False, window_size=7, sbl_depth=1,
                        embed_dim=16, num_heads=4, num_cab_per_orb=2,
                        num_orb=1)


def make_clean_images(out_dir, count: int, size: int = 128,
                      base_seed: int = 0) -> list[str]:
    """Procedural smooth test images (independent of the simulator's own
    generator): low-frequency fields with a few hard shapes."""
    out_dir.mkdir(parents=True, exist_ok=True)
    stems = []
    for i in range(count):
        rng = np.random.default_rng(base_seed + i)
        coarse = rng.uniform(0, 255, (6, 6, 3))
        img = np.asarray(Image.fromarray(coarse.astype(np.uint8)).resize(
            (size, size), Image.BICUBIC), dtype=np.float64)
        for _ in range(3):
            x0, y0 = rng.integers(0, size - 16, 2)
            w, h = rng.integers(8, size // 3, 2)
            img[y0:y0 + h, x0:x0 + w] = rng.uniform(0, 255, 3)
        yy, xx = np.mgrid[0:size, 0:size]
        img[..., 0] += 20 * np.sin(2 * np.pi * xx / rng.integers(24, 64))
        stem = f"im{i:02d}"
        Image.fromarray(np.clip(img, 0, 255).astype(np.uint8)).save(
            out_dir / f"{stem}.png")
        stems.append(stem)
    return stems


@pytest.fixture(scope="session")
def uplink_cli() -> str:
    exe = shutil.which("uavlink")
    assert exe, "the uplink simulator CLI must be installed"
    return exe


@pytest.fixture(scope="session")
def desk_dataset(tmp_path_factory, uplink_cli):
    """A small low-SNR dataset produced through the simulator's public CLI:
    20 procedural 128x128 images transmitted at 1/3/5 dB, 300 Hz."""
    root = tmp_path_factory.mktemp("desk")
    clean = root / "clean_src"
    make_clean_images(clean, 20, size=128, base_seed=7)
    out = root / "ds"
    res = subprocess.run(
        [uplink_cli, "generate", "--in", str(clean), "--out", str(out),
         "--snr", "1,3,5", "--doppler", "300", "--seed", "3"],
        capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    return out
