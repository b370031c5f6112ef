"""Image fidelity and detection metrics.

PSNR over 8-bit RGB (infinite for identical inputs), SSIM on luminance
with the standard 11x11 Gaussian window (sigma 1.5, valid windows only),
binary-mask IoU (two empty masks count as a perfect match), and
COCO-style average precision with 101-point interpolation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import convolve2d

_LUMA = np.array([0.299, 0.587, 0.114])


def _as_float(img: np.ndarray) -> np.ndarray:
    return np.asarray(img, dtype=np.float64)


def psnr(a: np.ndarray, b: np.ndarray, data_range: float = 255.0) -> float:
    """Peak signal-to-noise ratio in dB; +inf when the inputs are identical."""
    a, b = _as_float(a), _as_float(b)
    if a.shape != b.shape:
        raise ValueError("shape mismatch")
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return float("inf")
    return float(10.0 * np.log10(data_range**2 / mse))


def _gaussian_kernel(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    r = np.arange(size) - (size - 1) / 2
    k = np.exp(-(r**2) / (2 * sigma**2))
    k2 = np.outer(k, k)
    return k2 / k2.sum()


_SSIM_KERNEL = _gaussian_kernel()


def luminance(img: np.ndarray) -> np.ndarray:
    img = _as_float(img)
    if img.ndim == 3:
        return img @ _LUMA
    return img


def ssim(a: np.ndarray, b: np.ndarray, data_range: float = 255.0) -> float:
    """Mean structural similarity over valid 11x11 windows of the luminance."""
    x, y = luminance(a), luminance(b)
    if x.shape != y.shape:
        raise ValueError("shape mismatch")
    if min(x.shape) < 11:
        raise ValueError("image smaller than the SSIM window")
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2
    k = _SSIM_KERNEL

    mu_x = convolve2d(x, k, mode="valid")
    mu_y = convolve2d(y, k, mode="valid")
    xx = convolve2d(x * x, k, mode="valid") - mu_x**2
    yy = convolve2d(y * y, k, mode="valid") - mu_y**2
    xy = convolve2d(x * y, k, mode="valid") - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * xy + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (xx + yy + c2)
    return float(np.mean(num / den))


def iou(mask_a: np.ndarray, mask_b: np.ndarray) -> float:
    """Intersection over union of two binary masks; empty/empty -> 1.0."""
    a = np.asarray(mask_a, dtype=bool)
    b = np.asarray(mask_b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError("shape mismatch")
    union = np.logical_or(a, b).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(a, b).sum() / union)


@dataclass
class DetectionSet:
    """Axis-aligned boxes with confidence scores and integer class labels."""

    boxes: np.ndarray = field(default_factory=lambda: np.zeros((0, 4)))
    scores: np.ndarray = field(default_factory=lambda: np.zeros(0))
    labels: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    def __post_init__(self):
        self.boxes = np.asarray(self.boxes, dtype=np.float64).reshape(-1, 4)
        self.scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if not (len(self.boxes) == len(self.scores) == len(self.labels)):
            raise ValueError("boxes, scores, labels lengths differ")

    def __len__(self) -> int:
        return len(self.boxes)

    def save(self, path: str | Path) -> None:
        rows = [
            {"box": self.boxes[i].tolist(), "score": float(self.scores[i]),
             "label": int(self.labels[i])}
            for i in range(len(self))
        ]
        Path(path).write_text(json.dumps(rows))

    @classmethod
    def load(cls, path: str | Path) -> "DetectionSet":
        rows = json.loads(Path(path).read_text())
        if not rows:
            return cls()
        return cls(
            boxes=np.array([r["box"] for r in rows]),
            scores=np.array([r["score"] for r in rows]),
            labels=np.array([r["label"] for r in rows]),
        )


def box_iou(boxes_a: np.ndarray, boxes_b: np.ndarray) -> np.ndarray:
    """Pairwise IoU of (N, 4) and (M, 4) xyxy boxes -> (N, M)."""
    a = np.asarray(boxes_a, dtype=np.float64).reshape(-1, 4)
    b = np.asarray(boxes_b, dtype=np.float64).reshape(-1, 4)
    x1 = np.maximum(a[:, None, 0], b[None, :, 0])
    y1 = np.maximum(a[:, None, 1], b[None, :, 1])
    x2 = np.minimum(a[:, None, 2], b[None, :, 2])
    y2 = np.minimum(a[:, None, 3], b[None, :, 3])
    inter = np.clip(x2 - x1, 0, None) * np.clip(y2 - y1, 0, None)
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(union > 0, inter / union, 0.0)
    return out


def _class_ap(preds, gts, label: int, thr: float) -> float | None:
    """101-point interpolated AP of one class at one IoU threshold.

    Greedy matching in global confidence order; each ground-truth box can
    match once.  Returns None when the class has no ground truth.
    """
    n_gt = sum(int((g.labels == label).sum()) for g in gts)
    if n_gt == 0:
        return None
    dets = []  # (score, image_idx, box)
    for i, p in enumerate(preds):
        for j in np.flatnonzero(p.labels == label):
            dets.append((float(p.scores[j]), i, p.boxes[j]))
    if not dets:
        return 0.0
    dets.sort(key=lambda d: -d[0])
    matched = [np.zeros(int((g.labels == label).sum()), dtype=bool)
               for g in gts]
    gt_boxes = [g.boxes[g.labels == label] for g in gts]
    tp = np.zeros(len(dets))
    for k, (_, i, box) in enumerate(dets):
        if len(gt_boxes[i]) == 0:
            continue
        ious = box_iou(box[None, :], gt_boxes[i])[0]
        ious[matched[i]] = -1.0
        best = int(np.argmax(ious))
        if ious[best] >= thr:
            matched[i][best] = True
            tp[k] = 1.0
    cum_tp = np.cumsum(tp)
    recall = cum_tp / n_gt
    precision = cum_tp / np.arange(1, len(dets) + 1)
    grid = np.linspace(0, 1, 101)
    interp = np.zeros_like(grid)
    for gi, r in enumerate(grid):
        ok = recall >= r
        interp[gi] = precision[ok].max() if ok.any() else 0.0
    return float(interp.mean())


def mean_average_precision(preds: list[DetectionSet], gts: list[DetectionSet],
                           thresholds=None) -> float:
    """mAP over classes present in the ground truth, averaged over thresholds.

    thresholds defaults to the single value 0.5; pass
    np.arange(0.5, 1.0, 0.05) for the COCO-style strict variant.
    """
    if len(preds) != len(gts):
        raise ValueError("prediction/ground-truth image counts differ")
    if thresholds is None:
        thresholds = (0.5,)
    labels = sorted({int(l) for g in gts for l in g.labels})
    if not labels:
        raise ValueError("no ground-truth objects")
    aps = []
    for thr in thresholds:
        for label in labels:
            ap = _class_ap(preds, gts, label, float(thr))
            if ap is not None:
                aps.append(ap)
    return float(np.mean(aps))


def map_50(preds, gts) -> float:
    return mean_average_precision(preds, gts, (0.5,))


def map_50_95(preds, gts) -> float:
    return mean_average_precision(preds, gts, np.arange(0.5, 1.0, 0.05))
