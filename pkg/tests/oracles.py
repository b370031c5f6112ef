"""Independent brute-force reference implementations used as test oracles.

Everything here is deliberately written the slow, obvious way (explicit
loops, textbook definitions) and shares no code with the package under
test.  Unit and acceptance tests compare the fast implementations
against these.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

# ---------------------------------------------------------------------------
# CRC: plain long division over GF(2), bit at a time.

CRC_POLYS = {
    "crc24a": (24, 0x864CFB),
    "crc24b": (24, 0x800063),
    "crc16": (16, 0x1021),
}


def crc_longdivision(bits, name):
    width, poly = CRC_POLYS[name]
    register = list(bits) + [0] * width
    taps = [(poly >> (width - 1 - i)) & 1 for i in range(width)]
    for i in range(len(bits)):
        if register[i]:
            register[i] = 0
            for j, t in enumerate(taps):
                register[i + 1 + j] ^= t
    return np.array(register[-width:], dtype=np.uint8)


# ---------------------------------------------------------------------------
# LDPC: expand the base graph into an explicit sparse parity-check matrix
# and check H @ c = 0 (mod 2) directly.


def expand_parity_matrix(graph, i_ls, z):
    """Lift a base graph into the full (rows*z, cols*z) binary H."""
    rows = []
    cols = []
    for r in range(graph.n_rows):
        for c, shift in zip(graph.row_cols[r], graph.shifts[i_ls][r]):
            s = int(shift) % z
            block_rows = np.arange(z)
            block_cols = (block_rows + s) % z
            rows.append(r * z + block_rows)
            cols.append(int(c) * z + block_cols)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.ones(len(rows), dtype=np.uint8)
    return sparse.coo_matrix(
        (data, (rows, cols)),
        shape=(graph.n_rows * z, graph.n_cols * z),
    ).tocsr()


def syndrome_weight(h, codeword):
    return int(((h @ codeword.astype(np.int64)) % 2).sum())


# ---------------------------------------------------------------------------
# Rate matching: walk the circular buffer one bit at a time.


def tx_positions(n, z, filler_start, filler_end, k0, e):
    """Positions (into the length-n buffer) sent for one redundancy version."""
    out = []
    j = k0
    while len(out) < e:
        if not (filler_start <= j < filler_end):
            out.append(j)
        j = (j + 1) % n
    return np.array(out, dtype=np.int64)


# ---------------------------------------------------------------------------
# 64-QAM: hand-frozen per-axis Gray table (value before 1/sqrt(42) scaling).

QAM64_AXIS_TABLE = {
    (0, 0, 0): 3,
    (0, 0, 1): 1,
    (0, 1, 0): 5,
    (0, 1, 1): 7,
    (1, 0, 0): -3,
    (1, 0, 1): -1,
    (1, 1, 0): -5,
    (1, 1, 1): -7,
}


def qam64_reference(bits6):
    b = tuple(int(v) for v in bits6)
    i = QAM64_AXIS_TABLE[(b[0], b[2], b[4])]
    q = QAM64_AXIS_TABLE[(b[1], b[3], b[5])]
    return (i + 1j * q) / np.sqrt(42.0)


def qam64_all_points():
    """All 64 constellation points indexed by the 6-bit word (MSB first)."""
    points = np.empty(64, dtype=complex)
    for word in range(64):
        bits = [(word >> (5 - k)) & 1 for k in range(6)]
        points[word] = qam64_reference(bits)
    return points


def demap_llr_bruteforce(symbol, noise_var):
    """Max-log LLRs by scanning all 64 points, bit by bit."""
    points = qam64_all_points()
    d2 = np.abs(symbol - points) ** 2
    llrs = np.empty(6)
    for k in range(6):
        bit_of_word = np.array([(w >> (5 - k)) & 1 for w in range(64)])
        llrs[k] = (d2[bit_of_word == 1].min() - d2[bit_of_word == 0].min()) / noise_var
    return llrs


# ---------------------------------------------------------------------------
# Gold sequence: direct two-LFSR bit loop.


def gold_bits_reference(c_init, length, nc=1600):
    total = nc + length
    x1 = [0] * (total + 31)
    x2 = [0] * (total + 31)
    x1[0] = 1
    for i in range(31):
        x2[i] = (c_init >> i) & 1
    for i in range(total):
        x1[i + 31] = (x1[i + 3] + x1[i]) % 2
        x2[i + 31] = (x2[i + 3] + x2[i + 2] + x2[i + 1] + x2[i]) % 2
    return np.array(
        [(x1[i + nc] + x2[i + nc]) % 2 for i in range(length)], dtype=np.uint8
    )


# ---------------------------------------------------------------------------
# FNV-1a 64-bit, byte loop.


def fnv1a64_reference(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) % (1 << 64)
    return h


# ---------------------------------------------------------------------------
# Image metrics, textbook loops.


def psnr_naive(ref, test):
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    mse = 0.0
    flat_r = ref.ravel()
    flat_t = test.ravel()
    for a, b in zip(flat_r, flat_t):
        mse += (a - b) ** 2
    mse /= flat_r.size
    if mse == 0:
        return float("inf")
    return 10.0 * np.log10(255.0**2 / mse)


def _gaussian_kernel_naive(size=11, sigma=1.5):
    half = size // 2
    k = np.empty((size, size))
    for i in range(size):
        for j in range(size):
            k[i, j] = np.exp(-((i - half) ** 2 + (j - half) ** 2) / (2 * sigma**2))
    return k / k.sum()


def _luminance_naive(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        return img
    return 0.299 * img[..., 0] + 0.587 * img[..., 1] + 0.114 * img[..., 2]


def ssim_naive(ref, test):
    """Mean SSIM over all valid 11x11 windows, Gaussian-weighted."""
    x = _luminance_naive(ref)
    y = _luminance_naive(test)
    k = _gaussian_kernel_naive()
    c1 = (0.01 * 255.0) ** 2
    c2 = (0.03 * 255.0) ** 2
    h, w = x.shape
    vals = []
    for i in range(h - 10):
        for j in range(w - 10):
            wx = x[i : i + 11, j : j + 11]
            wy = y[i : i + 11, j : j + 11]
            mx = (k * wx).sum()
            my = (k * wy).sum()
            vx = (k * wx * wx).sum() - mx * mx
            vy = (k * wy * wy).sum() - my * my
            cxy = (k * wx * wy).sum() - mx * my
            vals.append(
                ((2 * mx * my + c1) * (2 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2))
            )
    return float(np.mean(vals))


def iou_naive(box_a, box_b):
    ax0, ay0, ax1, ay1 = box_a
    bx0, by0, bx1, by1 = box_b
    ix0, iy0 = max(ax0, bx0), max(ay0, by0)
    ix1, iy1 = min(ax1, bx1), min(ay1, by1)
    iw, ih = max(0.0, ix1 - ix0), max(0.0, iy1 - iy0)
    inter = iw * ih
    area_a = max(0.0, ax1 - ax0) * max(0.0, ay1 - ay0)
    area_b = max(0.0, bx1 - bx0) * max(0.0, by1 - by0)
    union = area_a + area_b - inter
    if union == 0:
        return 1.0 if inter == 0 else 0.0
    return inter / union


def average_precision_naive(gt_boxes, det_boxes, det_scores, iou_thr):
    """Single-class AP, 101-point interpolation, greedy match by confidence.

    gt_boxes: list of (image_id, box); det_boxes: list of (image_id, box).
    """
    order = sorted(range(len(det_boxes)), key=lambda i: -det_scores[i])
    matched = [False] * len(gt_boxes)
    tp = []
    for di in order:
        img, dbox = det_boxes[di]
        best, best_iou = -1, iou_thr
        for gi, (gimg, gbox) in enumerate(gt_boxes):
            if gimg != img or matched[gi]:
                continue
            v = iou_naive(dbox, gbox)
            if v >= best_iou:
                best, best_iou = gi, v
        if best >= 0:
            matched[best] = True
            tp.append(1)
        else:
            tp.append(0)
    n_gt = len(gt_boxes)
    if n_gt == 0:
        return None
    precisions, recalls = [], []
    cum_tp = 0
    for i, flag in enumerate(tp, start=1):
        cum_tp += flag
        precisions.append(cum_tp / i)
        recalls.append(cum_tp / n_gt)
    ap = 0.0
    for r in np.linspace(0.0, 1.0, 101):
        best_p = 0.0
        for p, rec in zip(precisions, recalls):
            if rec >= r and p > best_p:
                best_p = p
        ap += best_p / 101.0
    return ap


# ---------------------------------------------------------------------------
# 5x5 filters with replicated edges, nested loops.


def mean5_naive(img):
    img = np.asarray(img)
    h, w, c = img.shape
    out = np.empty_like(img)
    for ch in range(c):
        for i in range(h):
            for j in range(w):
                acc = 0
                for di in range(-2, 3):
                    for dj in range(-2, 3):
                        ii = min(max(i + di, 0), h - 1)
                        jj = min(max(j + dj, 0), w - 1)
                        acc += int(img[ii, jj, ch])
                out[i, j, ch] = (acc + 12) // 25
    return out


def median5_naive(img):
    img = np.asarray(img)
    h, w, c = img.shape
    out = np.empty_like(img)
    for ch in range(c):
        for i in range(h):
            for j in range(w):
                vals = []
                for di in range(-2, 3):
                    for dj in range(-2, 3):
                        ii = min(max(i + di, 0), h - 1)
                        jj = min(max(j + dj, 0), w - 1)
                        vals.append(img[ii, jj, ch])
                out[i, j, ch] = int(np.median(vals))
    return out
