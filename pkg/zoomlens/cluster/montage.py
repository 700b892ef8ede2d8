from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from zoomlens.cluster.affinity import ClusterResult
from zoomlens.fundus.sample import to_uint8

logger = logging.getLogger(__name__)

TILE_SIZE = 64
TILE_GAP = 2


def _tile(patch: np.ndarray) -> Image.Image:
    return Image.fromarray(to_uint8(patch)).resize(
        (TILE_SIZE, TILE_SIZE), Image.Resampling.BILINEAR
    )


def compose_montage(patches: Sequence[np.ndarray]) -> Image.Image:
    columns = math.ceil(math.sqrt(len(patches)))
    rows = math.ceil(len(patches) / columns)
    step = TILE_SIZE + TILE_GAP
    canvas = Image.new("RGB", (columns * step - TILE_GAP, rows * step - TILE_GAP))
    for i, patch in enumerate(patches):
        row, col = divmod(i, columns)
        canvas.paste(_tile(patch), (col * step, row * step))
    return canvas


def export_cluster_montage(
    result: ClusterResult,
    patches: Sequence[np.ndarray],
    out_dir: Path,
    max_tiles: int = 16,
) -> list[Path]:
    """One PNG per cluster with the exemplar first. Returns the written paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for number, (exemplar, members) in enumerate(result.clusters().items()):
        path = out_dir / f"cluster_{number:03d}_exemplar_{exemplar}.png"
        compose_montage([patches[i] for i in members[:max_tiles]]).save(path, format="PNG")
        paths.append(path)
    logger.info(f"Wrote {len(paths)} cluster montage(s) to '{out_dir}'.")
    return paths
