from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from zoomlens.constants import GRADES
from zoomlens.exceptions import InvalidArgumentError


@dataclass
class EyePairBatch:
    """
    Both eyes of one patient as C x H x W arrays. A missing sibling is None,
    which runs the model in single-eye mode for that pair.
    """

    left: np.ndarray
    right: np.ndarray | None
    left_grade: int
    right_grade: int | None
    patient_id: str = ""

    def __post_init__(self):
        for grade in (self.left_grade, self.right_grade):
            if grade is not None and grade not in GRADES:
                raise InvalidArgumentError(f"Grade must be in 0..4, got {grade}.")
        if (self.right is None) != (self.right_grade is None):
            raise InvalidArgumentError("Right image and right grade go together.")

    @property
    def has_sibling(self) -> bool:
        return self.right is not None

    def swapped(self) -> EyePairBatch:
        if self.right is None:
            raise InvalidArgumentError("Can't swap a single-eye pair.")
        return EyePairBatch(
            self.right, self.left, self.right_grade, self.left_grade, self.patient_id
        )

    def eyes(self) -> list[tuple[str, np.ndarray, int]]:
        result = [("left", self.left, self.left_grade)]
        if self.right is not None:
            result.append(("right", self.right, self.right_grade))
        return result
