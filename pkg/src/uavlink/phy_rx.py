"""Receive PHY: CP-OFDM demodulation, MMSE combining, soft 64-QAM demapping.

The equalizer assumes genie channel knowledge: the per-symbol frequency
response is computed from the channel realization at each symbol's
midpoint.  Equalized symbols follow the biased MMSE combiner

    s_hat = sum_a conj(H_a) y_a / (sum_a |H_a|^2 + N0)

with per-RE post-equalization noise variance N0 / sum_a |H_a|^2 (floored
at 1e-12).  Max-log LLRs factor per axis over the 8 Gray-mapped levels;
positive LLR means bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .phy_tx import (
    AXIS_LEVELS,
    FFT_SIZE,
    N_SUBCARRIERS,
    N_SYMBOLS,
    QAM64_BITS,
    _BINS,
    slot_symbol_starts,
)

_NOISE_FLOOR = 1e-12
_SIGNED_BINS = np.arange(N_SUBCARRIERS) - N_SUBCARRIERS // 2

# Per-axis bit patterns of AXIS_LEVELS indices: (msb, mid, lsb).
_BIT_OF_LEVEL = np.array(
    [[(i >> 2) & 1, (i >> 1) & 1, i & 1] for i in range(8)], dtype=np.uint8
)


@dataclass(frozen=True)
class EqualizedGrid:
    """Equalized symbol estimates and their effective noise variances."""

    symbols: np.ndarray          # (14, 624) complex
    noise_var: np.ndarray        # (14, 624) float, post-equalization


def ofdm_demodulate(samples: np.ndarray) -> np.ndarray:
    """Slot waveform(s) back to resource grids.

    Accepts (n_samples,) or (n_rx, n_samples); returns (..., 14, 624).
    """
    x = np.asarray(samples, dtype=np.complex128)
    starts = slot_symbol_starts()
    windows = np.stack(
        [x[..., s : s + FFT_SIZE] for s in starts], axis=-2
    )
    freq = np.fft.fft(windows, axis=-1, norm="ortho")
    return freq[..., _BINS]


def genie_frequency_response(realization: ChannelRealization,
                             slot_start_sample: int) -> np.ndarray:
    """Per-symbol channel frequency response, (n_rx, 14, 624).

    Fading is sampled at each symbol's useful-part midpoint; delay taps
    turn into linear phase across the active subcarriers.
    """
    fs = realization.config.sample_rate
    mids = slot_start_sample + slot_symbol_starts() + FFT_SIZE // 2
    gains = realization.cluster_gains(mids / fs)  # (n_cl, n_rx, 14)
    phase = np.exp(
        -2j * np.pi * np.outer(realization.tap_delays, _SIGNED_BINS) / FFT_SIZE
    )  # (n_cl, 624)
    return np.einsum("cat,cf->atf", gains, phase)


def mmse_equalize(rx_grids: np.ndarray, h: np.ndarray,
                  n0: float) -> EqualizedGrid:
    """Combine antennas per resource element with the biased MMSE rule."""
    rx_grids = np.asarray(rx_grids)
    h = np.asarray(h)
    if rx_grids.shape != h.shape:
        raise ValueError("grid and channel shapes differ")
    h2 = (np.abs(h) ** 2).sum(axis=0)
    num = (np.conj(h) * rx_grids).sum(axis=0)
    sym = num / np.maximum(h2 + n0, _NOISE_FLOOR)
    nv = n0 / np.maximum(h2, _NOISE_FLOOR)
    return EqualizedGrid(symbols=sym, noise_var=np.maximum(nv, _NOISE_FLOOR))


def demap_qam64_maxlog(symbols: np.ndarray,
                       noise_var: np.ndarray | float) -> np.ndarray:
    """Max-log LLRs for Gray 64-QAM, shape (..., 6); positive means bit 0.

    Each axis is compared with its 8 candidate levels; for every bit the
    LLR is the difference of the best bit=1 and best bit=0 squared
    distances, scaled by the per-symbol noise variance.
    """
    symbols = np.asarray(symbols)
    nv = np.broadcast_to(np.asarray(noise_var, dtype=np.float64),
                         symbols.shape)
    out = np.empty(symbols.shape + (QAM64_BITS,), dtype=np.float64)
    for axis, values in ((0, symbols.real), (1, symbols.imag)):
        d2 = (values[..., None] - AXIS_LEVELS) ** 2  # (..., 8)
        for pos in range(3):
            mask1 = _BIT_OF_LEVEL[:, pos] == 1
            min0 = d2[..., ~mask1].min(axis=-1)
            min1 = d2[..., mask1].min(axis=-1)
            out[..., axis + 2 * pos] = (min1 - min0) / nv
    return out
