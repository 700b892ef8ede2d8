"""
Inference over a dataset split with one checkpoint or an ensemble of
them, and the metrics report built from it.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from zoomlens.fundus import FundusDataset, FundusPair, prepare_pair
from zoomlens.harness.config import RunConfig
from zoomlens.harness.train import build_model
from zoomlens.metrics import MetricsReport, ensemble_average, head_metrics, recall_curves
from zoomlens.model import ZoomNet, predicted_grade
from zoomlens.parsers.csv.boxes import boxes_from_csv, regions_from_csv
from zoomlens.parsers.csv.predictions import (
    PredictionRow,
    predictions_from_csv,
    predictions_to_csv,
)
from zoomlens.sampler import BBox, ZoomRegions
from zoomlens.tensor import no_grad
from zoomlens.utils import get_worker_count

logger = logging.getLogger(__name__)

HEADS = ("M", "A", "MA", "C")
FINAL_HEAD = "final"
METRICS_FILE = "metrics.json"
CURVES_FILE = "curves.csv"
PREDICTIONS_FILE = "predictions.csv"


@dataclass
class EyePrediction:
    image_id: str
    grade: int
    probabilities: dict[str, np.ndarray]
    regions: ZoomRegions
    gt_boxes: list[BBox] = field(default_factory=list)
    sampled_boxes: list[BBox] = field(default_factory=list)
    gated: np.ndarray | None = None
    image: np.ndarray | None = None


def load_models(config: RunConfig, checkpoints: Sequence[Path]) -> list[ZoomNet]:
    models = []
    for path in checkpoints:
        model = build_model(config)
        model.load(path)
        models.append(model)
    return models


def predict_pair(
    models: Sequence[ZoomNet],
    pair: FundusPair,
    config: RunConfig,
    keep_images: bool = False,
) -> list[EyePrediction]:
    """
    Head probabilities averaged over 'models'. Regions and gated maps come
    from the first model. The final head is C-Net when every model was
    trained through phase 3, M-Net otherwise.
    """
    prepared = prepare_pair(
        pair, config.input_size, config.high_res_size, config.border_threshold
    )
    per_model = []
    with no_grad():
        for model in models:
            per_model.append(model(prepared.low, prepared.high, phase=3).eyes())

    use_c = all(model.trained_phase >= 3 for model in models)
    model_config = models[0].config
    predictions = []
    for eye_index, sample in enumerate(prepared.samples):
        outputs = [eyes[eye_index] for eyes in per_model]
        probabilities = {
            "M": ensemble_average([o.y_m.data for o in outputs]),
            "A": ensemble_average([o.y_a.data for o in outputs]),
            "MA": ensemble_average([o.y_ma for o in outputs]),
            "C": ensemble_average([o.y_c.data for o in outputs]),
        }
        probabilities[FINAL_HEAD] = probabilities["C" if use_c else "M"]

        first = outputs[0]
        size = model_config.high_res_size
        predictions.append(
            EyePrediction(
                image_id=sample.image_id,
                grade=sample.grade,
                probabilities=probabilities,
                regions=first.regions,
                gt_boxes=prepared.boxes[eye_index],
                sampled_boxes=first.regions.crop_boxes_at_low_res(
                    model_config.scale, model_config.patch_size, size, size
                ),
                gated=first.gated.data[0].copy() if keep_images else None,
                image=(
                    (prepared.low.left, prepared.low.right)[eye_index]
                    if keep_images
                    else None
                ),
            )
        )
    return predictions


def predict_dataset(
    models: Sequence[ZoomNet],
    dataset: FundusDataset,
    config: RunConfig,
    keep_images: bool = False,
) -> list[EyePrediction]:
    """Fans pairs out over worker threads; the result keeps dataset order."""
    with ThreadPoolExecutor(max_workers=get_worker_count()) as executor:
        per_pair = executor.map(
            lambda pair: predict_pair(models, pair, config, keep_images), dataset.pairs
        )
        return [prediction for group in per_pair for prediction in group]


def build_report(
    predictions: Sequence[EyePrediction],
    config: RunConfig,
    checkpoints: Sequence[Path] = (),
) -> MetricsReport:
    grades = [p.grade for p in predictions]
    report = MetricsReport(
        sample_count=len(predictions), checkpoints=[str(c) for c in checkpoints]
    )
    for head in (*HEADS, FINAL_HEAD):
        report.heads[head] = head_metrics(
            [p.probabilities[head] for p in predictions], grades, config.specificity
        )
    report.box_recall, report.person_recall = recall_curves(
        {p.image_id: p.gt_boxes for p in predictions},
        {p.image_id: p.sampled_boxes for p in predictions},
        config.iom_thresholds,
    )
    return report


def prediction_rows(predictions: Sequence[EyePrediction], head: str = FINAL_HEAD):
    return [
        PredictionRow(
            p.image_id,
            p.grade,
            p.probabilities[head],
            predicted_grade(p.probabilities[head]),
        )
        for p in predictions
    ]


def evaluate(
    config: RunConfig,
    checkpoints: Sequence[Path],
    dataset: FundusDataset,
    out_dir: Path | None = None,
) -> MetricsReport:
    """Writes metrics.json, curves.csv and predictions.csv when out_dir is given."""
    models = load_models(config, checkpoints)
    logger.info(f"Evaluating {len(dataset)} pairs with {len(models)} model(s).")
    predictions = predict_dataset(models, dataset, config)
    report = build_report(predictions, config, checkpoints)

    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        report.write(out_dir / METRICS_FILE, out_dir / CURVES_FILE)
        predictions_to_csv(out_dir / PREDICTIONS_FILE, prediction_rows(predictions))
    return report


def report_from_files(
    predictions_csv: Path,
    config: RunConfig,
    lesions_csv: Path | None = None,
    regions_csv: Path | None = None,
) -> tuple[MetricsReport, list[str]]:
    """
    Rebuilds a report from a predictions CSV and, when both are given,
    ground-truth and sampled box CSVs in the same pixel frame.
    """
    rows, errors = predictions_from_csv(predictions_csv)
    report = MetricsReport(sample_count=len(rows))
    if rows:
        report.heads[FINAL_HEAD] = head_metrics(
            [r.probabilities for r in rows],
            [r.grade_true for r in rows],
            config.specificity,
        )

    if lesions_csv is not None and regions_csv is not None:
        gt, gt_errors = boxes_from_csv(lesions_csv)
        sampled, sampled_errors = regions_from_csv(regions_csv)
        errors += gt_errors + sampled_errors
        report.box_recall, report.person_recall = recall_curves(
            {image_id: [box for _, box in items] for image_id, items in gt.items()},
            sampled,
            config.iom_thresholds,
        )
    return report, errors
