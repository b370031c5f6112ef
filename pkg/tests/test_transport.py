"""Image <-> bit packing and block splitting."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavlink.transport import (
    ImagePayload,
    bits_to_image,
    image_to_bits,
    load_image,
    merge_blocks,
    save_image,
    split_into_blocks,
)


def test_bit_packing_is_msb_first_row_major():
    img = np.zeros((1, 2, 3), dtype=np.uint8)
    img[0, 0] = (0b10000001, 0b00000010, 0b11111111)
    img[0, 1] = (1, 0, 128)
    bits = image_to_bits(img)
    want = [1,0,0,0,0,0,0,1, 0,0,0,0,0,0,1,0, 1,1,1,1,1,1,1,1,
            0,0,0,0,0,0,0,1, 0,0,0,0,0,0,0,0, 1,0,0,0,0,0,0,0]
    np.testing.assert_array_equal(bits, want)


@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_bits_roundtrip(seed):
    rng = np.random.default_rng(seed)
    img = rng.integers(0, 256, (5, 7, 3), dtype=np.uint8)
    out = bits_to_image(image_to_bits(img), img.shape)
    np.testing.assert_array_equal(out, img)


def test_bits_to_image_ignores_padding():
    img = np.arange(12, dtype=np.uint8).reshape(2, 2, 3)
    bits = image_to_bits(img)
    padded = np.concatenate([bits, np.ones(37, dtype=np.uint8)])
    np.testing.assert_array_equal(bits_to_image(padded, img.shape), img)


@given(
    n_bits=st.integers(min_value=1, max_value=5000),
    block=st.integers(min_value=8, max_value=1024),
)
@settings(max_examples=40, deadline=None)
def test_split_merge_roundtrip(n_bits, block):
    rng = np.random.default_rng(n_bits * 7919 + block)
    bits = rng.integers(0, 2, n_bits).astype(np.uint8)
    blocks = split_into_blocks(bits, block)
    assert blocks.ndim == 2 and blocks.shape[1] == block
    assert blocks.shape[0] == -(-n_bits // block)
    # padding is zeros
    assert not blocks.ravel()[n_bits:].any()
    np.testing.assert_array_equal(merge_blocks(blocks, n_bits), bits)


def test_payload_validation():
    with pytest.raises(ValueError):
        ImagePayload(pixels=np.zeros((4, 4), dtype=np.uint8), stem="x")
    with pytest.raises(ValueError):
        ImagePayload(pixels=np.zeros((4, 4, 3), dtype=np.float32), stem="x")
    p = ImagePayload(pixels=np.zeros((4, 6, 3), dtype=np.uint8), stem="ok")
    assert p.shape == (4, 6, 3)
    assert p.n_bits == 4 * 6 * 3 * 8


def test_save_load_roundtrip(tmp_path, small_image):
    path = tmp_path / "img.png"
    save_image(small_image, path)
    back = load_image(path)
    assert back.stem == "img"
    np.testing.assert_array_equal(back.pixels, small_image)
