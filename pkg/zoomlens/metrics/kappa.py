from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from zoomlens.constants import LEVEL_COUNT
from zoomlens.exceptions import InvalidArgumentError


def _as_grades(values: Sequence[int], what: str, levels: int) -> np.ndarray:
    grades = np.asarray(values)
    if grades.ndim != 1:
        raise InvalidArgumentError(f"{what} must be a flat sequence of grades.")
    if grades.size and (
        not np.issubdtype(grades.dtype, np.integer)
        or grades.min() < 0
        or grades.max() >= levels
    ):
        raise InvalidArgumentError(f"{what} must hold integer grades in 0..{levels - 1}.")
    return grades.astype(np.int64)


@dataclass
class ConfusionMatrix:
    """counts[i, j]: images with true grade i predicted as j."""

    counts: np.ndarray

    @classmethod
    def from_grades(
        cls, truths: Sequence[int], preds: Sequence[int], levels: int = LEVEL_COUNT
    ) -> ConfusionMatrix:
        truths = _as_grades(truths, "truths", levels)
        preds = _as_grades(preds, "preds", levels)
        if truths.size != preds.size:
            raise InvalidArgumentError(
                f"truths and preds differ in length ({truths.size} != {preds.size})."
            )
        if truths.size == 0:
            raise InvalidArgumentError("Can't rate an empty set of images.")

        counts = np.zeros((levels, levels), dtype=np.int64)
        np.add.at(counts, (truths, preds), 1)
        return cls(counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def expected(self) -> np.ndarray:
        return np.outer(self.counts.sum(axis=1), self.counts.sum(axis=0)) / self.total


def quadratic_weights(levels: int = LEVEL_COUNT) -> np.ndarray:
    i, j = np.indices((levels, levels))
    return (i - j) ** 2 / (levels - 1) ** 2


def quadratic_weighted_kappa(
    truths: Sequence[int], preds: Sequence[int], levels: int = LEVEL_COUNT
) -> float:
    """
    1 - sum(w * O) / sum(w * E) over all 'levels' classes, observed or not.
    When every rating falls in one shared class the expected disagreement is
    zero and kappa is 1.
    """
    confusion = ConfusionMatrix.from_grades(truths, preds, levels)
    weights = quadratic_weights(levels)
    expected_disagreement = float((weights * confusion.expected()).sum())
    if expected_disagreement == 0:
        return 1.0
    observed_disagreement = float((weights * confusion.counts).sum())
    return 1.0 - observed_disagreement / expected_disagreement
