"""
The end-to-end run: data, training, evaluation, region sampling, recall
curves and lesion clustering into one output directory, checked against
the acceptance thresholds.
"""

from __future__ import annotations

import logging
import shutil
from dataclasses import dataclass, field
from pathlib import Path

from zoomlens.constants import MANIFEST_FILE_NAME
from zoomlens.exceptions import OutputExistsError, ZoomlensException
from zoomlens.harness.cluster import cluster_lesions
from zoomlens.harness.config import RunConfig
from zoomlens.harness.data import generate_data, load_data
from zoomlens.harness.evaluate import (
    CURVES_FILE,
    METRICS_FILE,
    PREDICTIONS_FILE,
    build_report,
    load_models,
    prediction_rows,
    predict_dataset,
)
from zoomlens.harness.manifest import RunManifest
from zoomlens.harness.sample import write_regions
from zoomlens.harness.train import Trainer
from zoomlens.metrics import MetricsReport
from zoomlens.parsers.csv.predictions import predictions_to_csv
from zoomlens.requests import Post, post

logger = logging.getLogger(__name__)

DATA_DIR = "data"
CHECKPOINT_DIR = "checkpoints"
EVAL_DIR = "eval"
CLUSTER_DIR = "clusters"


@dataclass
class PipelineResult:
    report: MetricsReport
    manifest: RunManifest
    failures: list[str] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return not self.failures


def prepare_output_dir(out_dir: Path, force: bool) -> None:
    if out_dir.exists() and any(out_dir.iterdir()):
        if not force:
            raise OutputExistsError(f"Output directory '{out_dir}' is not empty.")
        logger.info(f"Clearing '{out_dir}'.")
        shutil.rmtree(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)


def acceptance_failures(report: MetricsReport, config: RunConfig) -> list[str]:
    failures = []
    kappa_m = report.kappa("M")
    kappa_c = report.kappa("C")
    if kappa_c < kappa_m + config.kappa_margin:
        failures.append(
            f"kappa of the full model ({kappa_c:.4f}) is not {config.kappa_margin} "
            f"above M-Net alone ({kappa_m:.4f})"
        )
    box = report.box_recall.at(config.iom_threshold)
    if box < config.box_recall:
        failures.append(
            f"box recall {box:.4f} at IoM {config.iom_threshold} is below {config.box_recall}"
        )
    person = report.person_recall.at(config.iom_threshold)
    if person < config.person_recall:
        failures.append(
            f"person recall {person:.4f} at IoM {config.iom_threshold} "
            f"is below {config.person_recall}"
        )
    return failures


class _Stage:
    def __init__(self, name: str, manifest: RunManifest):
        self.name = name
        self.manifest = manifest

    def __enter__(self):
        logger.info(f"Stage '{self.name}' started.")
        post(Post.PIPELINE_STAGE_STARTED, self.name)
        return self

    def __exit__(self, exc_type, exc_value, exc_traceback):
        if exc_type is None:
            self.manifest.stages.append(self.name)
            logger.info(f"Stage '{self.name}' done.")
            post(Post.PIPELINE_STAGE_DONE, self.name)
        elif issubclass(exc_type, ZoomlensException):
            logger.error(f"Stage '{self.name}' failed: {exc_value}")


def end_to_end(config: RunConfig, out_dir: Path, force: bool = False) -> PipelineResult:
    """
    Every stage writes under out_dir, and a failing stage leaves the
    outputs of the earlier ones in place.
    """
    prepare_output_dir(out_dir, force)
    manifest = RunManifest(config.config_hash(), config.seed)
    manifest_path = out_dir / MANIFEST_FILE_NAME

    try:
        with _Stage("gen-data", manifest):
            generate_data(config, out_dir / DATA_DIR)

        with _Stage("train", manifest):
            train_set = load_data(config, out_dir / DATA_DIR, "train")
            trained = Trainer(config, train_set, out_dir / CHECKPOINT_DIR).train()
            for phase, losses in trained.losses.items():
                manifest.record_losses(phase, losses)

        with _Stage("eval", manifest):
            test_set = load_data(config, out_dir / DATA_DIR, "test")
            checkpoints = [trained.final_checkpoint]
            models = load_models(config, checkpoints)
            predictions = predict_dataset(models, test_set, config)
            report = build_report(predictions, config, checkpoints)
            eval_dir = out_dir / EVAL_DIR
            eval_dir.mkdir(parents=True, exist_ok=True)
            report.write(eval_dir / METRICS_FILE, eval_dir / CURVES_FILE)
            predictions_to_csv(eval_dir / PREDICTIONS_FILE, prediction_rows(predictions))
            manifest.metrics = report.to_dict()

        with _Stage("sample", manifest):
            write_regions(predictions, out_dir / EVAL_DIR)

        with _Stage("cluster", manifest):
            cluster_lesions(config, models[0], test_set, out_dir / CLUSTER_DIR)
    finally:
        manifest.save(manifest_path)

    failures = acceptance_failures(report, config)
    for failure in failures:
        logger.warning(f"Acceptance: {failure}")
    return PipelineResult(report, manifest, failures)
