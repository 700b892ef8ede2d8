from __future__ import annotations

from enum import Enum
from typing import Sequence

import numpy as np

from zoomlens.constants import LEVEL_COUNT
from zoomlens.exceptions import InvalidArgumentError


class BinaryTask(Enum):
    REFERABLE = "referable"
    NORMAL = "normal"

    def is_positive(self, grade: int) -> bool:
        """Referable: grade >= 2. Normal task: the positive class is abnormal, grade >= 1."""
        return grade >= 2 if self is BinaryTask.REFERABLE else grade >= 1

    def labels(self, grades: Sequence[int]) -> np.ndarray:
        return np.array([int(self.is_positive(g)) for g in grades])


def _check_probabilities(y, tolerance: float) -> np.ndarray:
    y = np.asarray(getattr(y, "data", y), dtype=np.float64).reshape(-1)
    if (
        y.size != LEVEL_COUNT
        or np.any(y < -tolerance)
        or abs(y.sum() - 1) > tolerance
    ):
        raise InvalidArgumentError(f"Not a {LEVEL_COUNT}-level probability vector: {y}.")
    return y


def binary_scores(y, task: BinaryTask) -> float:
    y = _check_probabilities(y, 1e-6)
    if task is BinaryTask.REFERABLE:
        return float(y[2] + y[3] + y[4])
    return float(1 - y[0])


def binary_accuracy(
    scores: Sequence[float], labels: Sequence[int], threshold: float = 0.5
) -> float:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or not scores.size:
        raise InvalidArgumentError("scores and labels must be non-empty and of equal length.")
    return float(((scores >= threshold).astype(int) == labels).mean())


def ensemble_average(probabilities: Sequence) -> np.ndarray:
    if not len(probabilities):
        raise InvalidArgumentError("ensemble_average needs at least one vector.")
    stacked = np.stack([_check_probabilities(y, 1e-6) for y in probabilities])
    return stacked.mean(axis=0)
