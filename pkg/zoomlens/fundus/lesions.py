from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from zoomlens.constants import GRADES
from zoomlens.exceptions import InvalidArgumentError
from zoomlens.sampler import BBox


class LesionKind(Enum):
    DOT = "dot"
    BLOT = "blot"
    FLAME = "flame"
    SOFT_PATCH = "soft-patch"
    HARD_PATCH = "hard-patch"


@dataclass(frozen=True)
class LesionSpec:
    """
    'radius' is in pixels of a 320 px render and scales with the render
    size. 'counts' holds the inclusive (min, max) count for each grade.
    """

    kind: LesionKind
    radius: tuple[float, float]
    intensity: tuple[float, float]
    color: tuple[float, float, float]
    counts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.counts) != len(GRADES):
            raise InvalidArgumentError(f"{self.kind.value}: need a count range per grade.")
        lows = [low for low, _ in self.counts]
        highs = [high for _, high in self.counts]
        if lows != sorted(lows) or highs != sorted(highs):
            raise InvalidArgumentError(f"{self.kind.value}: counts must not drop with grade.")


LESION_SPECS = {
    LesionKind.DOT: LesionSpec(
        LesionKind.DOT,
        radius=(1.5, 2.5),
        intensity=(0.85, 0.95),
        color=(0.35, 0.05, 0.03),
        counts=((0, 0), (1, 2), (3, 5), (6, 9), (10, 14)),
    ),
    LesionKind.BLOT: LesionSpec(
        LesionKind.BLOT,
        radius=(3.5, 6.0),
        intensity=(0.8, 0.9),
        color=(0.30, 0.04, 0.02),
        counts=((0, 0), (0, 0), (1, 2), (2, 3), (3, 5)),
    ),
    LesionKind.FLAME: LesionSpec(
        LesionKind.FLAME,
        radius=(6.0, 11.0),
        intensity=(0.7, 0.85),
        color=(0.40, 0.05, 0.03),
        counts=((0, 0), (0, 0), (0, 0), (1, 2), (2, 4)),
    ),
    LesionKind.SOFT_PATCH: LesionSpec(
        LesionKind.SOFT_PATCH,
        radius=(5.0, 9.0),
        intensity=(0.6, 0.8),
        color=(0.92, 0.88, 0.78),
        counts=((0, 0), (0, 0), (1, 2), (1, 3), (2, 4)),
    ),
    LesionKind.HARD_PATCH: LesionSpec(
        LesionKind.HARD_PATCH,
        radius=(2.0, 4.0),
        intensity=(0.85, 0.95),
        color=(0.98, 0.90, 0.35),
        counts=((0, 0), (0, 0), (1, 2), (2, 3), (2, 4)),
    ),
}


@dataclass(frozen=True)
class Lesion:
    kind: LesionKind
    box: BBox


def lesion_counts(grade: int, rng: np.random.Generator) -> dict[LesionKind, int]:
    if grade not in GRADES:
        raise InvalidArgumentError(f"Grade must be in 0..4, got {grade}.")
    counts = {}
    for kind, spec in LESION_SPECS.items():
        low, high = spec.counts[grade]
        counts[kind] = int(rng.integers(low, high + 1))
    return counts
