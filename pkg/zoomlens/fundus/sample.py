from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image

from zoomlens.constants import GRADES
from zoomlens.exceptions import InvalidArgumentError, NotFoundError
from zoomlens.fundus.lesions import Lesion
from zoomlens.sampler import BBox


class Eye(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass
class FundusSample:
    """
    One eye: a 3 x H x W image in [0, 1] (or the PNG it lives in), its
    grade and the lesion boxes in image pixels.
    """

    image: np.ndarray | None
    grade: int
    lesions: list[Lesion] = field(default_factory=list)
    patient_id: str = ""
    eye: Eye = Eye.LEFT
    path: Path | None = None
    disc_box: BBox | None = None

    def __post_init__(self):
        if self.grade not in GRADES:
            raise InvalidArgumentError(f"Grade must be in 0..4, got {self.grade}.")
        if self.image is None and self.path is None:
            raise InvalidArgumentError("A sample needs pixels or a path to them.")

    @property
    def image_id(self) -> str:
        return f"{self.patient_id}_{self.eye.value}"

    @property
    def boxes(self) -> list[BBox]:
        return [lesion.box for lesion in self.lesions]

    def pixels(self) -> np.ndarray:
        if self.image is not None:
            return self.image
        return read_png(self.path)

    def without_pixels(self, path: Path) -> FundusSample:
        return replace(self, image=None, path=path)


def to_uint8(image: np.ndarray) -> np.ndarray:
    """3 x H x W floats in [0, 1] -> H x W x 3 bytes."""
    return np.rint(np.clip(image, 0, 1) * 255).astype(np.uint8).transpose(1, 2, 0)


def write_png(path: Path, image: np.ndarray) -> None:
    Image.fromarray(to_uint8(image)).save(path, format="PNG")


def read_png(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            array = np.asarray(img.convert("RGB"), dtype=np.float64)
    except FileNotFoundError:
        raise NotFoundError(f"No image at '{path}'.")
    return array.transpose(2, 0, 1) / 255.0
