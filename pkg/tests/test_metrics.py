"""Quality metrics against naive reimplementations and hand-built cases."""

import numpy as np
import pytest

import oracles
from uavlink.metrics import (
    DetectionSet,
    box_iou,
    iou,
    map_50,
    map_50_95,
    mean_average_precision,
    psnr,
    ssim,
)

# ---------------------------------------------------------------------------
# PSNR


def test_psnr_matches_naive(rng):
    a = rng.integers(0, 256, (17, 13, 3), dtype=np.uint8)
    b = rng.integers(0, 256, (17, 13, 3), dtype=np.uint8)
    assert psnr(a, b) == pytest.approx(oracles.psnr_naive(a, b), rel=1e-12)


def test_psnr_identical_is_infinite(rng):
    a = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
    assert np.isinf(psnr(a, a))


def test_psnr_known_value():
    a = np.zeros((4, 4, 3), dtype=np.uint8)
    b = a.copy()
    b[0, 0, 0] = 255  # MSE = 255^2/48
    assert psnr(a, b) == pytest.approx(10 * np.log10(48.0), rel=1e-12)


def test_psnr_shape_mismatch():
    with pytest.raises(ValueError):
        psnr(np.zeros((4, 4, 3), np.uint8), np.zeros((4, 5, 3), np.uint8))


# ---------------------------------------------------------------------------
# SSIM


def test_ssim_matches_naive(rng):
    a = rng.integers(0, 256, (20, 24, 3), dtype=np.uint8)
    b = np.clip(
        a.astype(float) + rng.normal(0, 20, a.shape), 0, 255
    ).astype(np.uint8)
    assert ssim(a, b) == pytest.approx(oracles.ssim_naive(a, b), abs=1e-6)


def test_ssim_identical_is_one(rng):
    a = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
    assert ssim(a, a) == pytest.approx(1.0, abs=1e-9)


def test_ssim_decreases_with_noise(rng):
    a = rng.integers(0, 256, (32, 32, 3), dtype=np.uint8)
    mild = np.clip(a.astype(float) + rng.normal(0, 5, a.shape), 0, 255)
    harsh = np.clip(a.astype(float) + rng.normal(0, 60, a.shape), 0, 255)
    assert ssim(a, mild.astype(np.uint8)) > ssim(a, harsh.astype(np.uint8))


def test_ssim_rejects_small_images():
    with pytest.raises(ValueError):
        ssim(np.zeros((8, 20, 3), np.uint8), np.zeros((8, 20, 3), np.uint8))


# ---------------------------------------------------------------------------
# IoU


def test_mask_iou_hand_cases():
    a = np.zeros((4, 4), dtype=bool)
    b = np.zeros((4, 4), dtype=bool)
    # both empty
    assert iou(a, b) == 1.0
    a[:2, :2] = True
    # one empty
    assert iou(a, b) == 0.0
    # identical
    assert iou(a, a) == 1.0
    # quarter overlap: |A|=4, |B|=4, inter=1 -> 1/7
    b[1:3, 1:3] = True
    assert iou(a, b) == pytest.approx(1 / 7, rel=1e-12)
    with pytest.raises(ValueError):
        iou(a, np.zeros((3, 3), dtype=bool))


def test_mask_iou_counts_pixels(rng):
    a = rng.random((30, 30)) > 0.5
    b = rng.random((30, 30)) > 0.5
    inter = int(np.sum(a & b))
    union = int(np.sum(a | b))
    assert iou(a, b) == pytest.approx(inter / union, rel=1e-12)


def test_box_iou_matches_naive(rng):
    for _ in range(200):
        a = np.sort(rng.uniform(0, 10, 4)).reshape(2, 2).T.ravel()
        b = np.sort(rng.uniform(0, 10, 4)).reshape(2, 2).T.ravel()
        box_a = (a[0], a[2], a[1], a[3])
        box_b = (b[0], b[2], b[1], b[3])
        got = box_iou(np.array([box_a]), np.array([box_b]))[0, 0]
        assert got == pytest.approx(
            oracles.iou_naive(box_a, box_b), rel=1e-12, abs=1e-12
        )


def test_box_iou_pairwise(rng):
    boxes_a = np.array([[0, 0, 2, 2], [1, 1, 3, 3]], dtype=float)
    boxes_b = np.array([[0, 0, 2, 2], [2, 2, 4, 4], [0, 0, 4, 4]], dtype=float)
    got = box_iou(boxes_a, boxes_b)
    assert got.shape == (2, 3)
    for i in range(2):
        for j in range(3):
            assert got[i, j] == pytest.approx(
                oracles.iou_naive(boxes_a[i], boxes_b[j]), rel=1e-12
            )


# ---------------------------------------------------------------------------
# mAP


def _det(boxes, scores, labels):
    return DetectionSet(
        boxes=np.array(boxes, dtype=float).reshape(-1, 4),
        scores=np.array(scores, dtype=float),
        labels=np.array(labels, dtype=np.int64),
    )


def _gt(boxes, labels):
    return DetectionSet(
        boxes=np.array(boxes, dtype=float).reshape(-1, 4),
        scores=np.ones(len(labels)),
        labels=np.array(labels, dtype=np.int64),
    )


def test_map_perfect_detection_is_one():
    gt = [_gt([[0, 0, 10, 10], [20, 20, 30, 30]], [0, 1])]
    det = [_det([[0, 0, 10, 10], [20, 20, 30, 30]], [0.9, 0.8], [0, 1])]
    assert map_50(det, gt) == pytest.approx(1.0)


def test_map_false_positive_after_tp():
    """One GT, the TP ranked first and an FP second: AP stays 1."""
    gt = [_gt([[0, 0, 10, 10]], [0])]
    det = [_det(
        [[0, 0, 10, 10], [50, 50, 60, 60]], [0.9, 0.5], [0, 0])]
    assert map_50(det, gt) == pytest.approx(1.0)


def test_map_false_positive_before_tp():
    """FP ranked above the TP: precision at full recall is 1/2, and the
    101-point interpolation gives exactly 0.5."""
    gt = [_gt([[0, 0, 10, 10]], [0])]
    det = [_det(
        [[50, 50, 60, 60], [0, 0, 10, 10]], [0.9, 0.5], [0, 0])]
    assert map_50(det, gt) == pytest.approx(0.5)


def test_map_missed_object():
    """Two GT, one detected: recall saturates at 0.5, precision 1."""
    gt = [_gt([[0, 0, 10, 10], [20, 20, 30, 30]], [0, 0])]
    det = [_det([[0, 0, 10, 10]], [0.9], [0])]
    # 101-point: max precision 1.0 for r in [0, 0.5] -> 51/101
    assert map_50(det, gt) == pytest.approx(51 / 101)


def test_map_matches_naive_random_scenes(rng):
    for trial in range(30):
        n_gt = int(rng.integers(1, 6))
        n_det = int(rng.integers(0, 8))
        gt_boxes = []
        for _ in range(n_gt):
            x, y = rng.uniform(0, 50, 2)
            w, h = rng.uniform(5, 20, 2)
            gt_boxes.append([x, y, x + w, y + h])
        det_boxes = []
        for _ in range(n_det):
            if gt_boxes and rng.random() < 0.6:
                bx = gt_boxes[int(rng.integers(0, n_gt))]
                jitter = rng.uniform(-3, 3, 4)
                det_boxes.append(list(np.array(bx) + jitter))
            else:
                x, y = rng.uniform(0, 50, 2)
                w, h = rng.uniform(5, 20, 2)
                det_boxes.append([x, y, x + w, y + h])
        scores = rng.uniform(0.1, 1.0, n_det)
        gt = [_gt(gt_boxes, [0] * n_gt)]
        det = [_det(det_boxes, scores, [0] * n_det) if n_det
               else _det(np.zeros((0, 4)), [], [])]
        got = map_50(det, gt)
        want = oracles.average_precision_naive(
            [("img", b) for b in gt_boxes],
            [("img", b) for b in det_boxes],
            list(scores),
            0.5,
        )
        assert got == pytest.approx(want, abs=1e-9), f"trial {trial}"


def test_map_classes_without_gt_are_skipped():
    gt = [_gt([[0, 0, 10, 10]], [0])]
    det = [_det(
        [[0, 0, 10, 10], [0, 0, 10, 10]], [0.9, 0.8], [0, 5])]
    # class 5 has no ground truth anywhere: ignored, not averaged as zero
    assert map_50(det, gt) == pytest.approx(1.0)


def test_map_requires_some_ground_truth():
    gt = [_gt(np.zeros((0, 4)), [])]
    det = [_det([[0, 0, 10, 10]], [0.9], [0])]
    with pytest.raises(ValueError):
        map_50(det, gt)


def test_map_50_95_between_map50_and_zero():
    gt = [_gt([[0, 0, 10, 10]], [0])]
    det = [_det([[1, 1, 10, 10]], [0.9], [0])]  # IoU ~ 0.81
    m50 = map_50(det, gt)
    m5095 = map_50_95(det, gt)
    assert m50 == pytest.approx(1.0)
    assert 0.0 < m5095 < m50
    # thresholds above the true IoU contribute zero
    got = mean_average_precision(det, gt, thresholds=(0.9,))
    assert got == pytest.approx(0.0)


def test_detection_set_json_roundtrip(tmp_path):
    d = _det([[0, 0, 10, 10], [5, 5, 8, 8]], [0.9, 0.2], [1, 3])
    path = tmp_path / "det.json"
    d.save(path)
    back = DetectionSet.load(path)
    np.testing.assert_allclose(back.boxes, d.boxes)
    np.testing.assert_allclose(back.scores, d.scores)
    np.testing.assert_array_equal(back.labels, d.labels)
