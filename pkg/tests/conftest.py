"""Shared fixtures for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from uavlink.synth import synthetic_image


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


@pytest.fixture(scope="session")
def small_image():
    """A 64x64 synthetic RGB test image."""
    return synthetic_image(seed=42, size=(64, 64))


@pytest.fixture(scope="session")
def tiny_clean_dir(tmp_path_factory):
    """Directory with two 32x32 clean images (single transport block each)."""
    from uavlink.transport import save_image

    path = tmp_path_factory.mktemp("clean32")
    for i in range(2):
        save_image(synthetic_image(seed=500 + i, size=(32, 32)), path / f"t{i}.png")
    return path
