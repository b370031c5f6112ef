"""Cyclic redundancy checks used by the transport chain.

Polynomials follow 3GPP TS 38.212 5.1: CRC24A/CRC24B for transport and
code blocks, CRC16 for short blocks.  All registers start at zero, no
reflection, no final xor; the CRC of a block with its CRC appended is 0.

Bit arrays are uint8 vectors, MSB first.  The byte-aligned prefix is
processed through a 256-entry table, the tail bit-serially.
"""

from __future__ import annotations

import numpy as np

# name -> (width, generator polynomial without the leading x^width term)
POLYNOMIALS: dict[str, tuple[int, int]] = {
    "crc24a": (24, 0x864CFB),
    "crc24b": (24, 0x800063),
    "crc16": (16, 0x1021),
}


def _byte_table(width: int, poly: int) -> np.ndarray:
    top = 1 << (width - 1)
    mask = (1 << width) - 1
    table = np.zeros(256, dtype=np.uint32)
    for byte in range(256):
        reg = byte << (width - 8)
        for _ in range(8):
            reg = ((reg << 1) ^ poly) & mask if reg & top else (reg << 1) & mask
        table[byte] = reg
    return table


_TABLES = {name: _byte_table(w, p) for name, (w, p) in POLYNOMIALS.items()}


def crc_remainder(bits: np.ndarray, name: str) -> np.ndarray:
    """CRC bits (MSB first) of a bit vector."""
    width, poly = POLYNOMIALS[name]
    table = _TABLES[name]
    bits = np.asarray(bits, dtype=np.uint8)
    n_bytes = len(bits) // 8
    reg = 0
    mask = (1 << width) - 1
    if n_bytes:
        data = np.packbits(bits[: n_bytes * 8])
        shift = width - 8
        for byte in data.tolist():
            reg = ((reg << 8) & mask) ^ int(table[(reg >> shift) ^ byte])
    top = 1 << (width - 1)
    for b in bits[n_bytes * 8 :].tolist():
        reg ^= b << (width - 1)
        reg = ((reg << 1) ^ poly) & mask if reg & top else (reg << 1) & mask
    out = np.zeros(width, dtype=np.uint8)
    for i in range(width):
        out[i] = (reg >> (width - 1 - i)) & 1
    return out


def crc_attach(bits: np.ndarray, name: str) -> np.ndarray:
    """Bits with their CRC appended."""
    bits = np.asarray(bits, dtype=np.uint8)
    return np.concatenate([bits, crc_remainder(bits, name)])


def crc_check(bits_with_crc: np.ndarray, name: str) -> bool:
    """True iff the trailing CRC matches the leading payload."""
    width, _ = POLYNOMIALS[name]
    bits_with_crc = np.asarray(bits_with_crc, dtype=np.uint8)
    if len(bits_with_crc) < width:
        raise ValueError("block shorter than the CRC width")
    return not crc_remainder(bits_with_crc, name).any()
