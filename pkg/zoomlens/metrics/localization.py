from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.sampler import BBox


def iom(a: BBox, b: BBox) -> float:
    """Intersection over the smaller of the two areas."""
    smaller = min(a.area, b.area)
    if smaller <= 0:
        raise InvalidArgumentError("iom needs boxes with positive area.")
    return a.intersection_area(b) / smaller


@dataclass
class RecallCurve:
    points: list[tuple[float, float]] = field(default_factory=list)

    def at(self, threshold: float) -> float:
        for t, recall in self.points:
            if np.isclose(t, threshold):
                return recall
        raise InvalidArgumentError(f"No recall recorded at threshold {threshold}.")

    @property
    def thresholds(self) -> list[float]:
        return [t for t, _ in self.points]

    @property
    def recalls(self) -> list[float]:
        return [r for _, r in self.points]


def best_iom_per_box(gt: Sequence[BBox], sampled: Sequence[BBox]) -> np.ndarray:
    best = np.zeros(len(gt))
    for i, truth in enumerate(gt):
        for box in sampled:
            best[i] = max(best[i], iom(truth, box))
    return best


def recall_curves(
    gt: Mapping[str, Sequence[BBox]],
    sampled: Mapping[str, Sequence[BBox]],
    thresholds: Sequence[float],
) -> tuple[RecallCurve, RecallCurve]:
    """
    Box recall: share of ground-truth boxes hit by some sampled box of the
    same image with IoM >= t, pooled over all images, so images with many
    boxes weigh more. Person recall: share of images with ground truth in
    which at least one box is hit, one vote per image. Box recall can
    therefore exceed person recall when hits cluster in box-rich images.
    Images without samples count as misses.
    """
    for t in thresholds:
        if not 0 < t <= 1:
            raise InvalidArgumentError(f"IoM thresholds must be in (0, 1], got {t}.")

    per_image = [
        best_iom_per_box(boxes, sampled.get(image_id, ()))
        for image_id, boxes in sorted(gt.items())
        if boxes
    ]
    if per_image:
        all_boxes = np.concatenate(per_image)
        best_per_image = np.array([best.max() for best in per_image])
    else:
        all_boxes = best_per_image = np.zeros(0)

    box_curve, person_curve = RecallCurve(), RecallCurve()
    for t in thresholds:
        box_curve.points.append(
            (float(t), float((all_boxes >= t).mean()) if all_boxes.size else 0.0)
        )
        person_curve.points.append(
            (
                float(t),
                float((best_per_image >= t).mean()) if best_per_image.size else 0.0,
            )
        )
    return box_curve, person_curve
