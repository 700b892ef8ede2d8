from __future__ import annotations

import numpy as np

from zoomlens.constants import GRADES
from zoomlens.exceptions import InvalidArgumentError
from zoomlens.fundus.render import FundusSpec, render
from zoomlens.fundus.sample import Eye, FundusSample
from zoomlens.utils import child_rng, derive_seed

NEAR_PROBABILITY = 0.95

_GRADE_STREAM = 0
_LEFT_STREAM = 1
_RIGHT_STREAM = 2


def draw_right_grade(rng: np.random.Generator, grade_left: int) -> int:
    """
    With probability NEAR_PROBABILITY a grade within one of 'grade_left',
    otherwise any farther grade, uniformly in both cases.
    """
    if grade_left not in GRADES:
        raise InvalidArgumentError(f"Grade must be in 0..4, got {grade_left}.")
    near = [g for g in GRADES if abs(g - grade_left) <= 1]
    far = [g for g in GRADES if abs(g - grade_left) > 1]
    if rng.uniform() < NEAR_PROBABILITY:
        return int(rng.choice(near))
    return int(rng.choice(far))


def generate_pair(
    seed: int, grade_left: int, size: int = 320, patient_id: str = ""
) -> tuple[FundusSample, FundusSample]:
    """Both eyes of one synthetic patient. A pure function of its arguments."""
    grade_right = draw_right_grade(child_rng(seed, _GRADE_STREAM), grade_left)
    left = render(
        FundusSpec(derive_seed(seed, _LEFT_STREAM), grade_left, patient_id, Eye.LEFT), size
    )
    right = render(
        FundusSpec(derive_seed(seed, _RIGHT_STREAM), grade_right, patient_id, Eye.RIGHT),
        size,
    )
    return left, right


def draw_left_grade(seed: int, index: int) -> int:
    return int(child_rng(seed, index).integers(len(GRADES)))


def generate_indexed_pair(
    seed: int, index: int, size: int = 320
) -> tuple[FundusSample, FundusSample]:
    """The index-th pair of the dataset drawn from master 'seed'."""
    return generate_pair(
        derive_seed(seed, index),
        draw_left_grade(seed, index),
        size,
        patient_id=patient_id_for(index),
    )


def patient_id_for(index: int) -> str:
    return f"p{index:05d}"
