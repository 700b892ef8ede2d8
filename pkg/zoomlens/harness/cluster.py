from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from zoomlens.cluster import (
    ClusterPoint,
    ClusterResult,
    SimilarityMatrix,
    ap_cluster,
    export_cluster_montage,
    gather_features,
)
from zoomlens.exceptions import InvalidArgumentError
from zoomlens.fundus import FundusDataset, prepare_eye
from zoomlens.harness.config import RunConfig
from zoomlens.model import ZoomNet
from zoomlens.parsers.csv.base import write_rows

logger = logging.getLogger(__name__)

ASSIGNMENTS_FILE = "assignments.csv"
MONTAGE_DIR = "montages"


@dataclass
class ClusteringOutcome:
    points: list[ClusterPoint]
    result: ClusterResult
    montages: list[Path] = field(default_factory=list)


def _low_res_images(dataset: FundusDataset, config: RunConfig):
    for sample in dataset.samples[: config.max_images]:
        prepared = prepare_eye(
            sample.pixels(),
            [],
            config.input_size,
            config.high_res_size,
            config.border_threshold,
        )
        yield sample.image_id, prepared.low


def cluster_lesions(
    config: RunConfig,
    model: ZoomNet,
    dataset: FundusDataset,
    out_dir: Path,
) -> ClusteringOutcome:
    """
    Clusters M features at the most attended cells of up to
    'max_images' images and writes assignments.csv plus one montage per
    cluster.
    """
    points = gather_features(_low_res_images(dataset, config), model, config.top_k)
    if not points:
        raise InvalidArgumentError("No images to cluster.")

    similarity = SimilarityMatrix.from_features(np.stack([p.feature for p in points]))
    result = ap_cluster(
        similarity,
        damping=config.damping,
        max_iter=config.max_iter,
        stable_iters=config.stable_iters,
        seed=config.seed,
        polish=config.polish,
    )
    logger.info(f"Found {len(result.exemplars)} cluster(s) over {len(points)} points.")

    out_dir.mkdir(parents=True, exist_ok=True)
    write_rows(
        out_dir / ASSIGNMENTS_FILE,
        ["point_id", "image_id", "cx", "cy", "exemplar_id"],
        (
            [i, p.image_id, *p.center, int(result.exemplar_of[i])]
            for i, p in enumerate(points)
        ),
    )
    montages = export_cluster_montage(
        result,
        [p.patch for p in points],
        out_dir / MONTAGE_DIR,
        config.montage_tiles,
    )
    return ClusteringOutcome(points, result, montages)
