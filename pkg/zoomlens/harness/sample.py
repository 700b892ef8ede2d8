from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image, ImageDraw

from zoomlens.fundus.sample import to_uint8
from zoomlens.harness.evaluate import EyePrediction
from zoomlens.parsers.csv.boxes import boxes_to_csv, regions_to_csv
from zoomlens.sampler import resize_bilinear

logger = logging.getLogger(__name__)

REGIONS_FILE = "regions.csv"
GT_BOXES_FILE = "gt_boxes.csv"
OVERLAY_DIR = "overlays"
BOX_COLOR = (0, 255, 0)


def region_rows(predictions: Sequence[EyePrediction]) -> list[list]:
    rows = []
    for p in predictions:
        for rank, (region, box) in enumerate(zip(p.regions, p.sampled_boxes)):
            rows.append(
                [p.image_id, rank, region.cx, region.cy, repr(region.value), *box.to_tuple()]
            )
    return rows


def write_regions(predictions: Sequence[EyePrediction], out_dir: Path) -> Path:
    """Sampled regions and the ground truth they are scored against, both in input pixels."""
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / REGIONS_FILE
    regions_to_csv(path, region_rows(predictions))
    boxes_to_csv(
        out_dir / GT_BOXES_FILE,
        {p.image_id: [("lesion", box) for box in p.gt_boxes] for p in predictions},
    )
    return path


def _heat_tile(gated: np.ndarray, size: int) -> np.ndarray:
    heat = resize_bilinear(gated, size, size)
    span = heat.max() - heat.min()
    heat = (heat - heat.min()) / span if span > 0 else np.zeros_like(heat)
    return np.stack([heat, heat * 0.3, 1 - heat])


def overlay_image(prediction: EyePrediction) -> Image.Image:
    """
    The input with its sampled boxes, followed by the gated maps of
    classes 1.. (class 0 carries no lesion evidence).
    """
    image = prediction.image
    size = image.shape[-1]
    tiles = [image] + [_heat_tile(g, size) for g in prediction.gated[1:]]
    canvas = Image.new("RGB", (size * len(tiles), size))
    for i, tile in enumerate(tiles):
        canvas.paste(Image.fromarray(to_uint8(tile)), (i * size, 0))

    draw = ImageDraw.Draw(canvas)
    for box in prediction.sampled_boxes:
        draw.rectangle([box.x, box.y, box.x2 - 1, box.y2 - 1], outline=BOX_COLOR)
    return canvas


def write_overlays(predictions: Sequence[EyePrediction], out_dir: Path) -> list[Path]:
    overlay_dir = out_dir / OVERLAY_DIR
    overlay_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for prediction in predictions:
        path = overlay_dir / f"{prediction.image_id}.png"
        overlay_image(prediction).save(path, format="PNG")
        paths.append(path)
    logger.info(f"Wrote {len(paths)} attention overlay(s) to '{overlay_dir}'.")
    return paths
