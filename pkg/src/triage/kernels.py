"""Numeric post-processing kernels for detection and classification scores.

Boxes use half-open pixel coordinates: pixel (x, y) is inside iff
x_min <= x < x_max and y_min <= y < y_max, so the area of an integer box is
exactly its pixel count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, order=False)
class Box:
    x_min: float
    y_min: float
    x_max: float
    y_max: float
    score: float = 1.0
    label: str = ""

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(
                f"degenerate box: ({self.x_min},{self.y_min},{self.x_max},{self.y_max})"
            )
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"box score must be in [0,1], got {self.score}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)


def softmax(logits) -> np.ndarray:
    """exp(z - max z) / sum(exp(z - max z)); stable for large logits."""
    z = np.asarray(logits, dtype=np.float64)
    if z.size == 0:
        raise ValueError("softmax of an empty vector")
    if not np.all(np.isfinite(z)):
        raise ValueError("softmax requires finite logits")
    shifted = z - z.max()
    e = np.exp(shifted)
    return e / e.sum()


def top_fraction_mean(score_map, fraction: float = 0.05) -> float:
    """Mean of the k = max(1, floor(fraction * n)) largest values.

    The floor-with-minimum-one rule means tiny maps still produce a score.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    values = np.asarray(score_map, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("empty score map")
    k = max(1, int(np.floor(fraction * values.size)))
    top = np.sort(values)[::-1][:k]
    return float(top.mean())


def iou(a: Box, b: Box) -> float:
    """Intersection over union; 0 when the boxes are disjoint."""
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union


def _priority(box: Box) -> tuple:
    # Highest score first; ties keep the box closer to the origin.
    return (-box.score, box.x_min, box.y_min, box.x_max, box.y_max, box.label)


def nms(boxes: list[Box], iou_threshold: float = 0.5) -> list[Box]:
    """Greedy per-label suppression.

    Repeatedly keep the highest-priority remaining box and drop same-label
    boxes overlapping it with IoU strictly above the threshold. Output is in
    descending score order (priority order).
    """
    if not 0.0 <= iou_threshold <= 1.0:
        raise ValueError(f"iou_threshold must be in [0,1], got {iou_threshold}")
    remaining = sorted(boxes, key=_priority)
    kept: list[Box] = []
    while remaining:
        best = remaining.pop(0)
        kept.append(best)
        remaining = [
            b
            for b in remaining
            if b.label != best.label or iou(best, b) <= iou_threshold
        ]
    return kept


def image_score_from_detections(
    boxes: list[Box], iou_threshold: float, target_label: str
) -> float:
    """Image-level score: max score among post-NMS boxes of the target label,
    0.0 when nothing survives (absence must rank below any detection)."""
    survivors = nms(boxes, iou_threshold)
    scores = [b.score for b in survivors if b.label == target_label]
    return max(scores) if scores else 0.0
