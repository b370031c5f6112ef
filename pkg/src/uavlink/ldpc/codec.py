"""Transport-block coding chain: CRC, segmentation, QC-LDPC, rate matching.

The chain mirrors the 5G NR UL-SCH layout: a 24-bit CRC on the transport
block, segmentation into equal code blocks with per-block CRC24B when
more than one block is needed, quasi-cyclic LDPC encoding on one of two
base graphs, and circular-buffer rate matching with redundancy versions
{0, 2, 3, 1}.  The first 2Z systematic bits never enter the circular
buffer; filler bits are skipped on transmission and pinned to a large
positive LLR on reception.

Bit convention: 0/1 uint8 arrays.  LLR convention: positive means bit 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .crc import crc_attach, crc_check
from .tables import ALL_LIFTING_SIZES, get_base_graph, lifting_set_index

FILLER_LLR = 1.0e6
MAX_CODE_BLOCK = {1: 8448, 2: 3840}
# k0 numerators per redundancy version; denominators are 66 (BG1) / 50 (BG2).
_RV_NUM = {1: {0: 0, 1: 17, 2: 33, 3: 56}, 2: {0: 0, 1: 13, 2: 25, 3: 43}}
RV_SEQUENCE = (0, 2, 3, 1)


@dataclass(frozen=True)
class LdpcConfig:
    """Per-transport-block coding parameters."""

    a: int            # payload bits in the transport block
    base_graph: int   # 1 or 2
    num_blocks: int   # C
    k_prime: int      # payload+CRC bits per code block
    z: int            # lifting size
    k: int            # systematic bits per code block (22Z or 10Z)
    n: int            # circular-buffer size per code block (66Z or 50Z)
    e: tuple[int, ...]  # rate-matched bits per code block

    @property
    def i_ls(self) -> int:
        return lifting_set_index(self.z)

    @property
    def n_fillers(self) -> int:
        return self.k - self.k_prime

    @property
    def cb_crc_len(self) -> int:
        return 24 if self.num_blocks > 1 else 0

    @property
    def data_per_block(self) -> int:
        return self.k_prime - self.cb_crc_len


def select_base_graph(a: int, rate: float) -> int:
    """Base-graph choice: BG2 for small blocks or very low rate, else BG1."""
    return 2 if a <= 3824 or rate <= 0.25 else 1


def _kb(base_graph: int, b: int) -> int:
    if base_graph == 1:
        return 22
    if b <= 192:
        return 6
    if b <= 560:
        return 8
    if b <= 640:
        return 9
    return 10


def choose_lifting_size(k_prime: int, kb: int) -> int:
    for z in ALL_LIFTING_SIZES:
        if kb * z >= k_prime:
            return z
    raise ValueError(f"no lifting size supports k'={k_prime} with kb={kb}")


def make_ldpc_config(a: int, rate: float, g: int, qm: int = 6) -> LdpcConfig:
    """Full segmentation/rate-matching arithmetic for one transport block.

    a: payload bits; rate: nominal code rate (base-graph choice only);
    g: total coded bits available; qm: modulation order (bits/symbol).
    """
    if a <= 0 or a % 8:
        raise ValueError("payload length must be a positive multiple of 8")
    bg = select_base_graph(a, rate)
    b = a + 24
    kcb = MAX_CODE_BLOCK[bg]
    if b <= kcb:
        c = 1
        b_prime = b
    else:
        c = math.ceil(b / (kcb - 24))
        b_prime = b + 24 * c
    k_prime = math.ceil(b_prime / c)
    kb = _kb(bg, b)
    z = choose_lifting_size(k_prime, kb)
    k = (22 if bg == 1 else 10) * z
    n = (66 if bg == 1 else 50) * z
    # Equal split of g over code blocks in whole modulation symbols.
    if g % qm:
        raise ValueError("g must be a whole number of modulation symbols")
    sym = g // qm
    e = tuple(
        qm * (sym // c + (1 if j >= c - (sym % c) else 0)) for j in range(c)
    )
    return LdpcConfig(a=a, base_graph=bg, num_blocks=c, k_prime=k_prime,
                      z=z, k=k, n=n, e=e)


def segment_tb(tb_with_crc: np.ndarray, cfg: LdpcConfig) -> np.ndarray:
    """Split a CRC-bearing transport block into (C, K) code blocks.

    Each block carries data, a CRC24B when C > 1, and zero fillers up to K.
    When the data region does not divide evenly the tail of the last block
    is zero-padded (removed again on desegmentation).
    """
    tb = np.asarray(tb_with_crc, dtype=np.uint8)
    if len(tb) != cfg.a + 24:
        raise ValueError("transport block length does not match the config")
    c, chunk = cfg.num_blocks, cfg.data_per_block
    data = np.zeros(c * chunk, dtype=np.uint8)
    data[: len(tb)] = tb
    out = np.zeros((c, cfg.k), dtype=np.uint8)
    for j in range(c):
        blk = data[j * chunk : (j + 1) * chunk]
        if cfg.cb_crc_len:
            blk = crc_attach(blk, "crc24b")
        out[j, : cfg.k_prime] = blk
    return out


def desegment_tb(cb_bits: np.ndarray, cfg: LdpcConfig):
    """Reassemble the payload from decoded code blocks.

    Returns (payload_bits, tb_crc_ok, per_block_crc_ok).  The payload is
    delivered regardless of CRC state.
    """
    cb_bits = np.asarray(cb_bits, dtype=np.uint8)
    if cb_bits.shape != (cfg.num_blocks, cfg.k):
        raise ValueError("code block array shape mismatch")
    chunks = []
    cb_ok = []
    for j in range(cfg.num_blocks):
        blk = cb_bits[j, : cfg.k_prime]
        if cfg.cb_crc_len:
            cb_ok.append(crc_check(blk, "crc24b"))
            chunks.append(blk[:-24])
        else:
            cb_ok.append(True)
            chunks.append(blk)
    b = np.concatenate(chunks)[: cfg.a + 24]
    tb_ok = crc_check(b, "crc24a")
    return b[: cfg.a], bool(tb_ok), cb_ok


@lru_cache(maxsize=64)
def _row_plan(bg: int, i_ls: int, z: int):
    """Per-row gather tables for the lifted graph at size z.

    For each row: block columns, shifts mod z, and flat indices into a
    (batch, n_cols*z) array selecting the row's rotated variable blocks.
    """
    g = get_base_graph(bg)
    plans = []
    zr = np.arange(z, dtype=np.int32)
    for r in range(g.n_rows):
        cols = g.row_cols[r]
        shifts = g.shifts[i_ls][r] % z
        idx = (zr[None, :] + shifts[:, None]) % z
        flat = (cols[:, None] * z + idx).astype(np.int32)
        plans.append((cols, shifts, flat))
    return g, plans


def _core_syndromes(m: np.ndarray, plans, kb_cols: int, z: int):
    """XOR syndromes of the four core rows restricted to systematic columns."""
    b = m.shape[0]
    syn = np.zeros((4, b, z), dtype=np.uint8)
    flat_m = m.reshape(b, -1)
    for r in range(4):
        cols, _, flat = plans[r]
        keep = cols < kb_cols
        gathered = flat_m[:, flat[keep]]
        syn[r] = np.bitwise_xor.reduce(gathered, axis=1)
    return syn


def ldpc_encode(cb_bits: np.ndarray, cfg: LdpcConfig) -> np.ndarray:
    """Encode (B, K) systematic bits into (B, N) circular-buffer codewords.

    Fillers are encoded as zeros; the first 2Z systematic bits are dropped
    from the returned buffer.  The dual-diagonal core gives p0 as the sum
    of the four core-row syndromes; p1..p3 follow by substitution and the
    extension parities directly.
    """
    bits = np.atleast_2d(np.asarray(cb_bits, dtype=np.uint8))
    if bits.shape[1] != cfg.k:
        raise ValueError("code block length must be K")
    g, plans = _row_plan(cfg.base_graph, cfg.i_ls, cfg.z)
    z, kb_cols = cfg.z, g.kb
    b = bits.shape[0]
    m = bits.reshape(b, kb_cols, z)

    syn = _core_syndromes(m, plans, kb_cols, z)
    p = np.zeros((b, g.n_rows, z), dtype=np.uint8)
    p0 = syn[0] ^ syn[1] ^ syn[2] ^ syn[3]
    p0_rot1 = np.roll(p0, -1, axis=-1)
    p[:, 0] = p0
    p[:, 1] = syn[0] ^ p0_rot1            # row 0: syn + P^1 p0 + p1 = 0
    p[:, 2] = syn[1] ^ p0 ^ p[:, 1]       # row 1: syn + p0 + p1 + p2 = 0
    p[:, 3] = syn[3] ^ p0_rot1            # row 3: syn + P^1 p0 + p3 = 0

    full = np.concatenate([m, p], axis=1)
    flat = full.reshape(b, -1)
    for r in range(4, g.n_rows):
        cols, _, fl = plans[r]
        keep = cols != kb_cols + r  # everything but the identity column
        acc = np.bitwise_xor.reduce(flat[:, fl[keep]], axis=1)
        full[:, kb_cols + r] = acc
        flat = full.reshape(b, -1)
    out = flat[:, 2 * z : (g.n_cols) * z]
    if out.shape[1] != cfg.n:
        raise AssertionError("buffer size mismatch")
    return out if cb_bits.ndim == 2 else out[0]


def parity_ok(full_bits: np.ndarray, cfg: LdpcConfig) -> np.ndarray:
    """Exact H*c == 0 check on (B, n_cols*z) full codewords."""
    g, plans = _row_plan(cfg.base_graph, cfg.i_ls, cfg.z)
    bits = np.atleast_2d(full_bits).astype(np.uint8)
    ok = np.ones(bits.shape[0], dtype=bool)
    for _, _, flat in plans:
        syn = np.bitwise_xor.reduce(bits[:, flat], axis=1)
        ok &= ~syn.any(axis=1)
    return ok


def rv_start(cfg: LdpcConfig, rv: int) -> int:
    """Circular-buffer start position k0 for a redundancy version."""
    num = _RV_NUM[cfg.base_graph][rv]
    den = 66 if cfg.base_graph == 1 else 50
    return (num * cfg.n) // (den * cfg.z) * cfg.z


@lru_cache(maxsize=256)
def _tx_order(bg: int, i_ls: int, z: int, k_prime: int, rv: int):
    """Non-filler buffer positions in circular transmit order from k0."""
    k = (22 if bg == 1 else 10) * z
    n = (66 if bg == 1 else 50) * z
    f0, f1 = k_prime - 2 * z, k - 2 * z
    nonfiller = np.concatenate(
        [np.arange(0, f0, dtype=np.int32), np.arange(f1, n, dtype=np.int32)]
    )
    num = _RV_NUM[bg][rv]
    den = 66 if bg == 1 else 50
    k0 = (num * n) // (den * z) * z
    pos = int(np.searchsorted(nonfiller, k0))
    if pos == len(nonfiller):
        pos = 0
    return np.roll(nonfiller, -pos)


def rate_match(buffer_bits: np.ndarray, cfg: LdpcConfig, rv: int,
               e: int) -> np.ndarray:
    """Select E transmitted bits from the circular buffer, skipping fillers."""
    order = _tx_order(cfg.base_graph, cfg.i_ls, cfg.z, cfg.k_prime, rv)
    buf = np.atleast_2d(buffer_bits)
    reps = -(-e // len(order))
    idx = np.tile(order, reps)[:e]
    out = buf[:, idx]
    return out if buffer_bits.ndim == 2 else out[0]


def rate_recover(llrs: np.ndarray, cfg: LdpcConfig, rv: int) -> np.ndarray:
    """Accumulate E received LLRs into an (B, N) buffer.

    Repeated positions add; unsent positions stay 0; fillers are pinned to
    +FILLER_LLR.  Add the outputs of successive transmissions for HARQ
    combining (re-pinning fillers is idempotent in practice since they are
    assigned, not added).
    """
    order = _tx_order(cfg.base_graph, cfg.i_ls, cfg.z, cfg.k_prime, rv)
    ll = np.atleast_2d(np.asarray(llrs, dtype=np.float32))
    b, e = ll.shape
    out = np.zeros((b, cfg.n), dtype=np.float32)
    span = len(order)
    full, rem = divmod(e, span)
    if full:
        out[:, order] += ll[:, : full * span].reshape(b, full, span).sum(axis=1)
    if rem:
        np.add.at(out, (slice(None), order[:rem]), ll[:, full * span :])
    out[:, cfg.k_prime - 2 * cfg.z : cfg.k - 2 * cfg.z] = FILLER_LLR
    return out if llrs.ndim == 2 else out[0]


def ldpc_decode(llr_buffer: np.ndarray, cfg: LdpcConfig, max_iter: int = 20,
                norm: float = 0.75):
    """Layered normalized min-sum decoding of (B, N) LLR buffers.

    Punctured head LLRs are 0.  Returns (bits (B, K), ok (B,), iters (B,)):
    hard systematic decisions, exact parity-check state, and the number of
    layered iterations each codeword ran before its checks cleared (0 when
    the channel decisions already satisfy H, max_iter when never cleared).
    Converged codewords are removed from the working batch each iteration.
    """
    ll = np.atleast_2d(np.asarray(llr_buffer, dtype=np.float32))
    b_total = ll.shape[0]
    if ll.shape[1] != cfg.n:
        raise ValueError("LLR buffer length must be N")
    g, plans = _row_plan(cfg.base_graph, cfg.i_ls, cfg.z)
    z = cfg.z
    l_full = np.concatenate(
        [np.zeros((b_total, 2 * z), dtype=np.float32), ll], axis=1
    )

    out_bits = np.zeros((b_total, cfg.k), dtype=np.uint8)
    out_ok = np.zeros(b_total, dtype=bool)
    out_iters = np.full(b_total, max_iter, dtype=np.int32)

    def syndrome_clear(lv: np.ndarray) -> np.ndarray:
        hard = lv < 0
        bad = np.zeros(lv.shape[0], dtype=bool)
        for _, _, flat in plans:
            syn = np.logical_xor.reduce(hard[:, flat], axis=1)
            bad |= syn.any(axis=1)
            if bad.all():
                break
        return ~bad

    active = np.arange(b_total)
    clear = syndrome_clear(l_full)
    if clear.any():
        idx = active[clear]
        out_bits[idx] = l_full[clear, : cfg.k] < 0
        out_ok[idx] = True
        out_iters[idx] = 0
        l_full = l_full[~clear]
        active = active[~clear]

    msgs = [np.zeros((len(active), len(p[0]), z), dtype=np.float32)
            for p in plans]
    d_arange = [np.arange(len(p[0]))[None, :, None] for p in plans]

    for it in range(1, max_iter + 1):
        if not len(active):
            break
        for r, (_, _, flat) in enumerate(plans):
            cur = l_full[:, flat]
            q = cur - msgs[r]
            absq = np.abs(q)
            neg = np.signbit(q)
            total_neg = np.logical_xor.reduce(neg, axis=1)
            am = absq.argmin(axis=1)
            m1 = np.take_along_axis(absq, am[:, None, :], axis=1)
            masked = absq.copy()
            np.put_along_axis(masked, am[:, None, :], np.inf, axis=1)
            m2 = masked.min(axis=1, keepdims=True)
            mag = np.where(d_arange[r] == am[:, None, :], m2, m1) * norm
            sign_others = np.logical_xor(total_neg[:, None, :], neg)
            new = np.where(sign_others, -mag, mag).astype(np.float32)
            l_full[:, flat] = q + new
            msgs[r] = new
        clear = syndrome_clear(l_full)
        if clear.any():
            idx = active[clear]
            out_bits[idx] = l_full[clear, : cfg.k] < 0
            out_ok[idx] = True
            out_iters[idx] = it
            keep = ~clear
            l_full = l_full[keep]
            active = active[keep]
            msgs = [m[keep] for m in msgs]

    if len(active):
        out_bits[active] = l_full[:, : cfg.k] < 0
    one_d = np.asarray(llr_buffer).ndim == 1
    if one_d:
        return out_bits[0], bool(out_ok[0]), int(out_iters[0])
    return out_bits, out_ok, out_iters
