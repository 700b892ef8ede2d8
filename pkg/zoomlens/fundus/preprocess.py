from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.sampler import BBox, resize_bilinear

LUMINANCE = np.array([0.299, 0.587, 0.114])
DIHEDRAL_COUNT = 8


def luminance(image: np.ndarray) -> np.ndarray:
    return np.tensordot(LUMINANCE, image, axes=(0, 0))


def border_box(image: np.ndarray, threshold: float = 0.02) -> BBox:
    """Tightest rectangle holding every pixel brighter than 'threshold'."""
    bright = luminance(image) > threshold
    rows = np.flatnonzero(bright.any(axis=1))
    cols = np.flatnonzero(bright.any(axis=0))
    if not rows.size:
        raise InvalidArgumentError("Image is entirely black.")
    return BBox(
        int(cols[0]), int(rows[0]), int(cols[-1] - cols[0] + 1), int(rows[-1] - rows[0] + 1)
    )


def crop_black_borders(
    image: np.ndarray, size: int | None = None, threshold: float = 0.02
) -> np.ndarray:
    """Drops the black frame, then resizes to size x size when 'size' is given."""
    box = border_box(image, threshold)
    cropped = image[:, box.y : box.y2, box.x : box.x2]
    if size is None:
        return cropped.copy()
    return resize_bilinear(cropped, size, size)


def map_box_through_crop(box: BBox, crop: BBox, size: int) -> BBox:
    """Follows a box from the original image into the cropped, resized one."""
    shifted = BBox(
        max(box.x - crop.x, 0),
        max(box.y - crop.y, 0),
        box.w,
        box.h,
    )
    return shifted.scaled(size / crop.w, size / crop.h).clamped(size, size)


def dihedral(image: np.ndarray, transform: int) -> np.ndarray:
    """
    transform in 0..7: 'transform % 4' counter-clockwise quarter turns, then
    a horizontal flip when transform >= 4.
    """
    if not 0 <= transform < DIHEDRAL_COUNT:
        raise InvalidArgumentError(f"Dihedral transform must be in 0..7, got {transform}.")
    if image.shape[-1] != image.shape[-2]:
        raise InvalidArgumentError(f"Can only rotate square images, got {image.shape}.")
    result = np.rot90(image, transform % 4, axes=(-2, -1))
    if transform >= 4:
        result = np.flip(result, axis=-1)
    return np.ascontiguousarray(result)


def dihedral_box(box: BBox, size: int, transform: int) -> BBox:
    for _ in range(transform % 4):
        box = BBox(box.y, size - box.x2, box.h, box.w)
    if transform >= 4:
        box = BBox(size - box.x2, box.y, box.w, box.h)
    return box


def augment(
    image: np.ndarray, rng: np.random.Generator, boxes: list[BBox] = ()
) -> tuple[np.ndarray, list[BBox], int]:
    """One of the 8 rotations/flips, chosen uniformly, applied to the image and its boxes."""
    if image.shape[-1] != image.shape[-2]:
        raise InvalidArgumentError(f"Can only augment square images, got {image.shape}.")
    transform = int(rng.integers(DIHEDRAL_COUNT))
    size = image.shape[-1]
    return (
        dihedral(image, transform),
        [dihedral_box(box, size, transform) for box in boxes],
        transform,
    )


@dataclass
class PreparedEye:
    low: np.ndarray
    high: np.ndarray
    boxes: list[BBox]
    transform: int = 0


def prepare_eye(
    image: np.ndarray,
    boxes: list[BBox],
    input_size: int,
    high_res_size: int,
    threshold: float = 0.02,
    rng: np.random.Generator | None = None,
) -> PreparedEye:
    """
    Border crop, resize to both resolutions and, with 'rng', one random
    dihedral transform shared by both resolutions. Boxes end up in
    low-resolution pixels.
    """
    crop = border_box(image, threshold)
    cropped = image[:, crop.y : crop.y2, crop.x : crop.x2]
    low = resize_bilinear(cropped, input_size, input_size)
    high = resize_bilinear(cropped, high_res_size, high_res_size)
    boxes = [map_box_through_crop(box, crop, input_size) for box in boxes]

    transform = 0
    if rng is not None:
        low, boxes, transform = augment(low, rng, boxes)
        high = dihedral(high, transform)

    return PreparedEye(low, high, boxes, transform)
