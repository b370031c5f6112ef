"""Deterministic procedural test imagery.

Generates reproducible 8-bit RGB scenes with piecewise-smooth regions,
geometric objects, and band-limited texture, so that transmission and
denoising metrics behave like they do on natural photographs.  The same
seed always yields the same image.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter


def synthetic_image(seed: int, size: tuple[int, int] = (224, 224)) -> np.ndarray:
    """One procedural RGB scene, (H, W, 3) uint8."""
    h, w = size
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    yy /= max(h - 1, 1)
    xx /= max(w - 1, 1)

    img = np.zeros((h, w, 3), dtype=np.float64)
    # Smooth background gradient with a random orientation per channel.
    for c in range(3):
        gx, gy = rng.uniform(-1, 1, 2)
        img[..., c] = 0.5 + 0.35 * (gx * (xx - 0.5) + gy * (yy - 0.5))

    # Large smooth blobs (low-frequency illumination).
    blob = gaussian_filter(rng.standard_normal((h, w)), sigma=min(h, w) / 8)
    blob /= max(np.abs(blob).max(), 1e-9)
    img += 0.25 * blob[..., None] * rng.uniform(0.5, 1.0, 3)

    # Flat-shaded geometric objects: ellipses and rectangles.
    for _ in range(rng.integers(4, 8)):
        color = rng.uniform(0.1, 0.9, 3)
        cy, cx = rng.uniform(0.15, 0.85, 2)
        if rng.random() < 0.5:
            ry, rx = rng.uniform(0.05, 0.25, 2)
            mask = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
        else:
            ry, rx = rng.uniform(0.05, 0.2, 2)
            mask = (np.abs(yy - cy) <= ry) & (np.abs(xx - cx) <= rx)
        alpha = rng.uniform(0.6, 1.0)
        img[mask] = (1 - alpha) * img[mask] + alpha * color

    # Band-limited texture so denoisers face realistic detail.
    tex = gaussian_filter(rng.standard_normal((h, w)), sigma=1.2)
    tex /= max(np.abs(tex).max(), 1e-9)
    img += 0.06 * tex[..., None]

    return np.clip(img * 255.0, 0, 255).round().astype(np.uint8)


def synthetic_set(n: int, base_seed: int = 0,
                  size: tuple[int, int] = (224, 224)) -> list[np.ndarray]:
    return [synthetic_image(base_seed + i, size) for i in range(n)]
