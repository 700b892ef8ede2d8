from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.model import ZoomNet
from zoomlens.sampler import BBox
from zoomlens.tensor import no_grad


@dataclass
class ClusterPoint:
    feature: np.ndarray
    image_id: str
    row: int
    col: int
    box: BBox
    patch: np.ndarray

    @property
    def center(self) -> tuple[int, int]:
        return self.box.x + self.box.w // 2, self.box.y + self.box.h // 2


def top_cells(attention_map: np.ndarray, top_k: int) -> list[tuple[int, int]]:
    """Grid cells by descending value; equal values keep row-major order."""
    if top_k < 1:
        raise InvalidArgumentError(f"top_k must be positive, got {top_k}.")
    order = np.argsort(-attention_map.reshape(-1), kind="stable")[:top_k]
    width = attention_map.shape[1]
    return [divmod(int(i), width) for i in order]


def cell_box(row: int, col: int, grid: int, image_size: int, box_size: int) -> BBox:
    cell = image_size / grid
    cx = int((col + 0.5) * cell)
    cy = int((row + 0.5) * cell)
    return BBox.centered(cx, cy, min(box_size, image_size), image_size, image_size)


def gather_features(
    images: Iterable[tuple[str, np.ndarray]],
    model: ZoomNet,
    top_k: int = 4,
) -> list[ClusterPoint]:
    """
    For each (image id, low-resolution image), the top_k cells of the
    gated map maxed over classes 1.., with the column of M at each cell
    and the image window of one region around it.
    """
    config = model.config
    points = []
    with no_grad():
        for image_id, image in images:
            feature_map, _ = model.mnet.encode(image)
            gated = model.anet(feature_map).gated.data[0]
            attention_map = gated[1:].max(axis=0)
            for row, col in top_cells(attention_map, top_k):
                box = cell_box(
                    row, col, config.grid_size, config.input_size, config.region_size
                )
                points.append(
                    ClusterPoint(
                        feature=feature_map.data[0, :, row, col].copy(),
                        image_id=image_id,
                        row=row,
                        col=col,
                        box=box,
                        patch=image[:, box.y : box.y2, box.x : box.x2].copy(),
                    )
                )
    return points
