"""
Greedy extraction of zoom regions from gated attention maps and their
mapping onto the high-resolution image.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.ndimage

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.sampler.bbox import BBox

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZoomRegion:
    cx: int
    cy: int
    value: float


@dataclass
class ZoomRegions:
    """Picked centers in low-resolution pixels, by non-increasing value."""

    regions: list[ZoomRegion] = field(default_factory=list)
    region_size: int = 1
    image_width: int = 1
    image_height: int = 1

    def __len__(self):
        return len(self.regions)

    def __iter__(self):
        return iter(self.regions)

    def __getitem__(self, item):
        return self.regions[item]

    def high_res_boxes(self, scale: float, patch: int, width: int, height: int):
        return [
            BBox.centered(*to_high_res(r.cx, r.cy, scale), patch, width, height)
            for r in self.regions
        ]

    def crop_boxes_at_low_res(
        self, scale: float, patch: int, width: int, height: int
    ) -> list[BBox]:
        """The C-Net crop windows expressed in low-resolution pixels."""
        return [
            box.scaled(1 / scale).clamped(self.image_width, self.image_height)
            for box in self.high_res_boxes(scale, patch, width, height)
        ]


def to_high_res(cx: int, cy: int, scale: float) -> tuple[int, int]:
    return int(np.rint(cx * scale)), int(np.rint(cy * scale))


def resize_bilinear(array: np.ndarray, target_h: int, target_w: int) -> np.ndarray:
    """
    Bilinear resize over the last two axes. Sample centers are aligned with
    pixel centers and values outside the grid repeat the edge.
    """
    height, width = array.shape[-2:]
    factors = (1,) * (array.ndim - 2) + (target_h / height, target_w / width)
    result = scipy.ndimage.zoom(
        array, factors, order=1, mode="nearest", grid_mode=True
    )
    # zoom rounds the output shape; pin it to the requested one
    return result[..., :target_h, :target_w]


def upsample_attention(gated, target_h: int, target_w: int) -> np.ndarray:
    """
    Per-pixel sampling map: pixelwise max over classes 1.. of the gated stack,
    bilinearly resized to the input image size. Class 0 carries no lesion
    evidence and is left out.
    """
    gated = np.asarray(getattr(gated, "data", gated), dtype=np.float64)
    if gated.ndim == 4:
        gated = gated[0]
    if gated.ndim != 3:
        raise InvalidArgumentError(f"Expected an L x H x W stack, got {gated.shape}.")
    if target_h < gated.shape[1] or target_w < gated.shape[2]:
        raise InvalidArgumentError("Upsampling target is smaller than the grid.")

    if gated.shape[0] < 2:
        collapsed = np.zeros(gated.shape[1:])
    else:
        collapsed = gated[1:].max(axis=0)

    return resize_bilinear(collapsed, target_h, target_w)


def greedy_sample(
    attention_map: np.ndarray, s: int, n: int, tau: float = -np.inf
) -> ZoomRegions:
    """
    Repeatedly records the global maximum and masks the window around it.
    The masked window spans ceil(s / 2) pixels on each side of the pick, so
    two picks are at least ceil(s / 2) + 1 apart in Chebyshev distance.
    Stops after n picks or once the remaining maximum falls below tau.
    Equal maxima resolve to the smallest row-major index.
    """
    if s < 1 or n < 1:
        raise InvalidArgumentError(f"Region size and count must be positive, got {s=}, {n=}.")

    height, width = attention_map.shape
    work = np.array(attention_map, dtype=np.float64)
    half = (s + 1) // 2
    picked = []

    while len(picked) < n:
        index = int(np.argmax(work))
        row, col = divmod(index, width)
        value = work[row, col]
        if value == -np.inf or value < tau:
            break
        picked.append(ZoomRegion(cx=col, cy=row, value=float(value)))
        work[
            max(row - half, 0) : row + half + 1,
            max(col - half, 0) : col + half + 1,
        ] = -np.inf

    return ZoomRegions(picked, region_size=s, image_width=width, image_height=height)


def stop_threshold(attention_map: np.ndarray, tau_ratio: float) -> float:
    """tau as a fraction of the initial maximum. Non-positive maps never stop early."""
    peak = float(attention_map.max())
    return tau_ratio * peak if peak > 0 else -np.inf


def crop_patches(
    high_res_image: np.ndarray,
    regions: ZoomRegions,
    scale: float,
    patch: int,
    n: int | None = None,
) -> list[np.ndarray]:
    """
    Crops patch x patch windows (C x H x W) around the scaled centers. Windows
    are clamped inside the image. With 'n' given, the last patch is repeated
    until there are n of them.
    """
    _, height, width = high_res_image.shape
    if patch > height or patch > width:
        raise InvalidArgumentError(
            f"Patch of {patch} px is larger than the {width}x{height} image."
        )
    if not len(regions):
        raise InvalidArgumentError("No regions to crop.")

    patches = []
    for box in regions.high_res_boxes(scale, patch, width, height):
        patches.append(high_res_image[:, box.y : box.y2, box.x : box.x2].copy())

    if n is not None:
        while len(patches) < n:
            patches.append(patches[-1].copy())

    return patches
