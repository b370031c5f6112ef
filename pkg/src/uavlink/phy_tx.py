"""Transmit PHY: 64-QAM mapping, DM-RS, resource grid, CP-OFDM.

Numerology is fixed at 15 kHz subcarrier spacing, 52 PRB (624 active
subcarriers), 14 symbols per slot, a 1024-point FFT at 15.36 Msps, and a
normal cyclic prefix of [80, 72*6] samples repeated per half slot (15360
samples per slot).  One front-loaded DM-RS symbol occupies the even
subcarriers of symbol 2; its odd-comb partners transmit zero, leaving
8112 data resource elements per slot (13 full symbols x 624).

FFTs use orthonormal scaling so grid power equals waveform power.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_SUBCARRIERS = 624
N_SYMBOLS = 14
FFT_SIZE = 1024
SAMPLE_RATE = 15.36e6
CP_LENGTHS = (80, 72, 72, 72, 72, 72, 72) * 2
SLOT_SAMPLES = N_SYMBOLS * FFT_SIZE + sum(CP_LENGTHS)  # 15360
DMRS_SYMBOL = 2
DMRS_SUBCARRIERS = np.arange(0, N_SUBCARRIERS, 2)
DATA_SYMBOLS = tuple(l for l in range(N_SYMBOLS) if l != DMRS_SYMBOL)
DATA_RES_PER_SLOT = len(DATA_SYMBOLS) * N_SUBCARRIERS  # 8112
QAM64_BITS = 6
_QAM64_SCALE = 1.0 / np.sqrt(42.0)

# Signed FFT bins of the active subcarriers: centered, no DC gap.
_BINS = (np.arange(N_SUBCARRIERS) - N_SUBCARRIERS // 2) % FFT_SIZE


@dataclass(frozen=True)
class ResourceGrid:
    """One slot of frequency-domain symbols, (14, 624) complex."""

    symbols: np.ndarray

    def __post_init__(self):
        if self.symbols.shape != (N_SYMBOLS, N_SUBCARRIERS):
            raise ValueError("grid must be (14, 624)")


@dataclass(frozen=True)
class Waveform:
    """Baseband time samples at SAMPLE_RATE."""

    samples: np.ndarray
    sample_rate: float = SAMPLE_RATE


def _axis_levels() -> np.ndarray:
    """Per-axis amplitude for the 3 bits (b_msb, b_mid, b_lsb) of one axis."""
    levels = np.zeros(8)
    for idx in range(8):
        b0, b2, b4 = (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        levels[idx] = (1 - 2 * b0) * (4 - (1 - 2 * b2) * (2 - (1 - 2 * b4)))
    return levels * _QAM64_SCALE


AXIS_LEVELS = _axis_levels()


def modulate_qam64(bits: np.ndarray) -> np.ndarray:
    """Gray-mapped 64-QAM, unit average power; bits 000000 -> (3+3j)/sqrt(42)."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % QAM64_BITS:
        raise ValueError("bit count must be a multiple of 6")
    b = bits.reshape(-1, QAM64_BITS)
    i_idx = (b[:, 0] << 2) | (b[:, 2] << 1) | b[:, 4]
    q_idx = (b[:, 1] << 2) | (b[:, 3] << 1) | b[:, 5]
    return AXIS_LEVELS[i_idx] + 1j * AXIS_LEVELS[q_idx]


def gold_sequence(c_init: int, length: int) -> np.ndarray:
    """Length-31 Gold sequence with the standard 1600-step fast-forward."""
    nc = 1600
    total = length + nc + 31
    x1 = np.zeros(total, dtype=np.uint8)
    x2 = np.zeros(total, dtype=np.uint8)
    x1[0] = 1
    for i in range(31):
        x2[i] = (c_init >> i) & 1
    for n in range(total - 31):
        x1[n + 31] = x1[n + 3] ^ x1[n]
        x2[n + 31] = x2[n + 3] ^ x2[n + 2] ^ x2[n + 1] ^ x2[n]
    return x1[nc : nc + length] ^ x2[nc : nc + length]


def dmrs_c_init(slot: int, n_id: int, symbol: int = DMRS_SYMBOL) -> int:
    return (
        (1 << 17) * (N_SYMBOLS * slot + symbol + 1) * (2 * n_id + 1) + 2 * n_id
    ) % (1 << 31)


def dmrs_sequence(slot: int, n_id: int) -> np.ndarray:
    """QPSK pilot symbols for the DM-RS comb of one slot (312 values)."""
    n = len(DMRS_SUBCARRIERS)
    c = gold_sequence(dmrs_c_init(slot, n_id), 2 * n).astype(np.float64)
    return ((1 - 2 * c[0::2]) + 1j * (1 - 2 * c[1::2])) / np.sqrt(2.0)


def map_to_grid(data_symbols: np.ndarray, slot: int, n_id: int) -> ResourceGrid:
    """Place data and DM-RS into one slot.

    Data fills the 13 non-DMRS symbols frequency-first in symbol order;
    the DM-RS symbol carries pilots on even subcarriers and zeros on odd.
    """
    data_symbols = np.asarray(data_symbols)
    if data_symbols.shape != (DATA_RES_PER_SLOT,):
        raise ValueError(f"expected {DATA_RES_PER_SLOT} data symbols")
    grid = np.zeros((N_SYMBOLS, N_SUBCARRIERS), dtype=np.complex128)
    grid[list(DATA_SYMBOLS), :] = data_symbols.reshape(
        len(DATA_SYMBOLS), N_SUBCARRIERS
    )
    grid[DMRS_SYMBOL, DMRS_SUBCARRIERS] = dmrs_sequence(slot, n_id)
    return ResourceGrid(symbols=grid)


def extract_data(grid_symbols: np.ndarray) -> np.ndarray:
    """Inverse of the map_to_grid data placement (any dtype, any leading dims)."""
    return grid_symbols[..., list(DATA_SYMBOLS), :].reshape(
        *grid_symbols.shape[:-2], DATA_RES_PER_SLOT
    )


def ofdm_modulate(grid: ResourceGrid) -> Waveform:
    """CP-OFDM slot waveform (15360 samples, orthonormal IFFT)."""
    freq = np.zeros((N_SYMBOLS, FFT_SIZE), dtype=np.complex128)
    freq[:, _BINS] = grid.symbols
    time = np.fft.ifft(freq, axis=1, norm="ortho")
    parts = []
    for l in range(N_SYMBOLS):
        cp = CP_LENGTHS[l]
        parts.append(time[l, -cp:])
        parts.append(time[l])
    return Waveform(samples=np.concatenate(parts))


def slot_symbol_starts() -> np.ndarray:
    """Sample index where each symbol's useful (post-CP) part begins."""
    starts = []
    pos = 0
    for l in range(N_SYMBOLS):
        pos += CP_LENGTHS[l]
        starts.append(pos)
        pos += FFT_SIZE
    return np.asarray(starts)
