"""Image payloads and their bit-level transport representation.

Images are 8-bit RGB arrays.  The transport mapping is row-major,
channel-interleaved, MSB first; payloads are padded with zero bits up to
a whole number of transport blocks and trimmed on reassembly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image


@dataclass(frozen=True)
class ImagePayload:
    """An RGB image together with its transport identity."""

    pixels: np.ndarray  # (H, W, 3) uint8
    stem: str = "image"

    def __post_init__(self):
        px = self.pixels
        if px.dtype != np.uint8 or px.ndim != 3 or px.shape[2] != 3:
            raise ValueError("pixels must be (H, W, 3) uint8")

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.pixels.shape

    @property
    def n_bits(self) -> int:
        return int(self.pixels.size) * 8


def load_image(path: str | Path) -> ImagePayload:
    p = Path(path)
    with Image.open(p) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return ImagePayload(pixels=arr, stem=p.stem)


def save_image(payload: ImagePayload | np.ndarray, path: str | Path) -> None:
    arr = payload.pixels if isinstance(payload, ImagePayload) else payload
    Image.fromarray(arr, mode="RGB").save(Path(path))


def image_to_bits(payload: ImagePayload | np.ndarray) -> np.ndarray:
    """Bit vector of the image: row-major RGB bytes, MSB first."""
    arr = payload.pixels if isinstance(payload, ImagePayload) else np.asarray(payload)
    if arr.dtype != np.uint8:
        raise ValueError("pixels must be uint8")
    return np.unpackbits(arr.reshape(-1))


def bits_to_image(bits: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Inverse of image_to_bits; extra trailing bits are ignored."""
    h, w = shape[:2]
    need = h * w * 3 * 8
    bits = np.asarray(bits, dtype=np.uint8)
    if len(bits) < need:
        raise ValueError("not enough bits for the requested shape")
    return np.packbits(bits[:need]).reshape(h, w, 3)


def split_into_blocks(bits: np.ndarray, block_size: int) -> np.ndarray:
    """Zero-pad to a whole number of blocks and split: (n_blocks, block_size)."""
    if block_size <= 0:
        raise ValueError("block size must be positive")
    bits = np.asarray(bits, dtype=np.uint8)
    n_blocks = max(1, math.ceil(len(bits) / block_size))
    padded = np.zeros(n_blocks * block_size, dtype=np.uint8)
    padded[: len(bits)] = bits
    return padded.reshape(n_blocks, block_size)


def merge_blocks(blocks: np.ndarray, n_bits: int) -> np.ndarray:
    """Concatenate block payloads and trim the padding."""
    flat = np.asarray(blocks, dtype=np.uint8).reshape(-1)
    if len(flat) < n_bits:
        raise ValueError("fewer bits than the payload needs")
    return flat[:n_bits]
