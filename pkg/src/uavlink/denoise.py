"""Classical denoisers: 5x5 mean, 5x5 median, and two-stage BM3D.

All filters take and return (H, W, 3) uint8 images and operate per
channel.  Edges are handled by replication, so every window averages a
full 25-pixel neighborhood.  BM3D runs the usual two stages (collaborative
hard thresholding, then Wiener filtering guided by the basic estimate)
with 8x8 blocks on a step-4 reference grid, a 39x39 search window, groups
of the 16 closest blocks, and a 2.7*sigma hard threshold.  The noise
level, when not given, is estimated with the high-pass residual method
(3x3 Laplacian-difference kernel, robust median scaling).
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dctn, idctn, dct, idct
from scipy.ndimage import median_filter as _nd_median
from scipy.signal import convolve2d

_BLOCK = 8
_STEP = 4
_SEARCH = 39
_MAX_OFFSET = (_SEARCH - _BLOCK) // 2  # 15
_GROUP = 16
_HARD_LAMBDA = 2.7

_SIGMA_KERNEL = np.array([[1, -2, 1], [-2, 4, -2], [1, -2, 1]], dtype=np.float64)

_KAISER = np.outer(np.kaiser(_BLOCK, 2.0), np.kaiser(_BLOCK, 2.0))


def _check_rgb(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.dtype != np.uint8 or img.ndim != 3 or img.shape[2] != 3:
        raise ValueError("expected (H, W, 3) uint8 image")
    return img


def mean_filter(img: np.ndarray) -> np.ndarray:
    """5x5 box average with edge replication and round-half-up division."""
    img = _check_rgb(img)
    padded = np.pad(img.astype(np.int64), ((2, 2), (2, 2), (0, 0)),
                    mode="edge")
    c = padded.cumsum(axis=0).cumsum(axis=1)
    c = np.pad(c, ((1, 0), (1, 0), (0, 0)))
    h, w = img.shape[:2]
    sums = (c[5 : 5 + h, 5 : 5 + w] - c[5 : 5 + h, :w]
            - c[:h, 5 : 5 + w] + c[:h, :w])
    return ((sums + 12) // 25).astype(np.uint8)


def median_filter(img: np.ndarray) -> np.ndarray:
    """5x5 median with edge replication."""
    img = _check_rgb(img)
    out = np.empty_like(img)
    for ch in range(3):
        out[..., ch] = _nd_median(img[..., ch], size=5, mode="nearest")
    return out


def estimate_sigma(img: np.ndarray) -> float:
    """Noise standard deviation on the 0..255 scale.

    High-pass residual through the Laplacian-difference kernel, scaled by
    the kernel norm (6) and the Gaussian median-to-sigma factor 1.4826,
    averaged over channels.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = img[..., None]
    vals = []
    for ch in range(img.shape[2]):
        resp = convolve2d(img[..., ch], _SIGMA_KERNEL, mode="valid")
        vals.append(1.4826 * np.median(np.abs(resp)) / 6.0)
    return float(np.mean(vals))


def _ref_positions(extent: int) -> np.ndarray:
    pos = list(range(0, extent - _BLOCK + 1, _STEP))
    if pos[-1] != extent - _BLOCK:
        pos.append(extent - _BLOCK)
    return np.asarray(pos)


def _block_distance_maps(ref: np.ndarray, ry: np.ndarray, rx: np.ndarray):
    """Squared distances from each reference block to every offset partner.

    Returns (dist (n_ref, n_off), offsets (n_off, 2)) where invalid offsets
    (partner outside the image) carry +inf.  Distances use the identity
    ||A-B||^2 = ||A||^2 + ||B||^2 - 2<A,B> with sliding sums via cumsum.
    """
    h, w = ref.shape
    sq = ref * ref

    def window_sum(a: np.ndarray) -> np.ndarray:
        c = np.pad(a, ((1, 0), (1, 0))).cumsum(0).cumsum(1)
        return (c[_BLOCK:, _BLOCK:] - c[_BLOCK:, :-_BLOCK]
                - c[:-_BLOCK, _BLOCK:] + c[:-_BLOCK, :-_BLOCK])

    norms = window_sum(sq)  # (h-7, w-7)
    n_ref = len(ry) * len(rx)
    offs = [(dy, dx)
            for dy in range(-_MAX_OFFSET, _MAX_OFFSET + 1)
            for dx in range(-_MAX_OFFSET, _MAX_OFFSET + 1)]
    dist = np.full((n_ref, len(offs)), np.inf, dtype=np.float64)
    ref_norms = norms[np.ix_(ry, rx)].reshape(-1)
    gy = np.repeat(ry, len(rx))
    gx = np.tile(rx, len(ry))
    for k, (dy, dx) in enumerate(offs):
        y0, x0 = max(0, -dy), max(0, -dx)
        y1 = h - max(0, dy)
        x1 = w - max(0, dx)
        if y1 - y0 < _BLOCK or x1 - x0 < _BLOCK:
            continue
        prod = ref[y0:y1, x0:x1] * ref[y0 + dy : y1 + dy, x0 + dx : x1 + dx]
        cross = window_sum(prod)  # top-left indexed from (y0, x0)
        py, px = gy + dy, gx + dx
        valid = (py >= 0) & (py <= h - _BLOCK) & (px >= 0) & (px <= w - _BLOCK)
        iy, ix = gy[valid] - y0, gx[valid] - x0
        d = (ref_norms[valid] + norms[py[valid], px[valid]]
             - 2.0 * cross[iy, ix])
        dist[valid, k] = d
    return dist, np.asarray(offs)


def _gather_groups(img: np.ndarray, pos: np.ndarray) -> np.ndarray:
    """Extract blocks at (N, G, 2) positions -> (N, G, B, B)."""
    ar = np.arange(_BLOCK)
    ys = pos[..., 0, None, None] + ar[:, None]
    xs = pos[..., 1, None, None] + ar[None, :]
    return img[ys, xs]


def _aggregate(est: np.ndarray, weights: np.ndarray, pos: np.ndarray,
               shape) -> np.ndarray:
    """Weighted overlap-add of (N, G, B, B) block estimates."""
    h, w = shape
    ar = np.arange(_BLOCK)
    flat = ((pos[..., 0, None, None] + ar[:, None]) * w
            + pos[..., 1, None, None] + ar[None, :]).reshape(-1)
    wk = (weights[:, :, None, None] * _KAISER)
    num = np.bincount(flat, weights=(est * wk).reshape(-1), minlength=h * w)
    den = np.bincount(flat, weights=np.broadcast_to(
        wk, est.shape).reshape(-1), minlength=h * w)
    return (num / np.maximum(den, 1e-12)).reshape(h, w)


def _match(channel: np.ndarray):
    h, w = channel.shape
    ry = _ref_positions(h)
    rx = _ref_positions(w)
    dist, offs = _block_distance_maps(channel, ry, rx)
    top = np.argpartition(dist, _GROUP - 1, axis=1)[:, :_GROUP]
    order = np.take_along_axis(dist, top, axis=1).argsort(axis=1)
    top = np.take_along_axis(top, order, axis=1)  # self first (distance 0)
    gy = np.repeat(ry, len(rx))[:, None] + offs[top, 0]
    gx = np.tile(rx, len(ry))[:, None] + offs[top, 1]
    return np.stack([gy, gx], axis=-1)  # (n_ref, GROUP, 2)


def _transform(groups: np.ndarray) -> np.ndarray:
    co = dctn(groups, axes=(2, 3), norm="ortho")
    return dct(co, axis=1, norm="ortho")


def _inverse(co: np.ndarray) -> np.ndarray:
    back = idct(co, axis=1, norm="ortho")
    return idctn(back, axes=(2, 3), norm="ortho")


def _bm3d_channel(noisy: np.ndarray, sigma: float) -> np.ndarray:
    h, w = noisy.shape
    # Stage 1: group on the noisy channel, hard-threshold, overlap-add.
    pos = _match(noisy)
    co = _transform(_gather_groups(noisy, pos))
    keep = np.abs(co) >= _HARD_LAMBDA * sigma
    nz = keep.reshape(len(co), -1).sum(axis=1)
    co *= keep
    est = _inverse(co)
    wts = np.repeat(1.0 / (np.maximum(nz, 1) * sigma**2), _GROUP
                    ).reshape(-1, _GROUP)
    basic = _aggregate(est, wts, pos, (h, w))

    # Stage 2: group on the basic estimate, Wiener-shrink the noisy groups.
    pos = _match(basic)
    co_basic = _transform(_gather_groups(basic, pos))
    wiener = co_basic**2 / (co_basic**2 + sigma**2)
    co = wiener * _transform(_gather_groups(noisy, pos))
    est = _inverse(co)
    wts = 1.0 / (sigma**2 * np.maximum(
        (wiener**2).reshape(len(wiener), -1).sum(axis=1), 1e-12))
    wts = np.repeat(wts, _GROUP).reshape(-1, _GROUP)
    return _aggregate(est, wts, pos, (h, w))


def bm3d_filter(img: np.ndarray, sigma: float | None = None) -> np.ndarray:
    """Two-stage BM3D; sigma on the 0..255 scale (estimated when omitted)."""
    img = _check_rgb(img)
    if sigma is None:
        sigma = estimate_sigma(img)
    sigma = max(float(sigma), 1e-3)
    out = np.empty_like(img)
    for ch in range(3):
        rec = _bm3d_channel(img[..., ch].astype(np.float64), sigma)
        out[..., ch] = np.clip(np.round(rec), 0, 255).astype(np.uint8)
    return out


FILTERS = {
    "mean": lambda img, sigma=None: mean_filter(img),
    "median": lambda img, sigma=None: median_filter(img),
    "bm3d": bm3d_filter,
}
