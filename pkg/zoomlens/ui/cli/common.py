from __future__ import annotations

import argparse
from pathlib import Path

from zoomlens import dirs
from zoomlens.constants import DEFAULT_OUTPUT_PATH
from zoomlens.exceptions import NotFoundError, OutputExistsError
from zoomlens.harness.config import RunConfig
from zoomlens.harness.pipeline import CHECKPOINT_DIR, DATA_DIR
from zoomlens.harness.train import FINAL_CHECKPOINT
from zoomlens.metrics import MetricsReport
from zoomlens.ui.cli import io

REPORT_HEADERS = [
    "head",
    "kappa",
    "referable AUC",
    "referable sens",
    "referable acc",
    "normal AUC",
    "normal sens",
    "normal acc",
]


def add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="TOML run config.")
    parser.add_argument("--seed", type=int, default=None, help="Overrides run.seed.")
    parser.add_argument(
        "--out", type=Path, default=DEFAULT_OUTPUT_PATH, help="Output directory."
    )
    parser.add_argument(
        "--force", action="store_true", help="Overwrite existing outputs."
    )


def add_data_arguments(parser: argparse.ArgumentParser, split: str | None) -> None:
    parser.add_argument(
        "--data", type=Path, default=None, help="Dataset directory. Defaults to OUT/data."
    )
    if split is not None:
        parser.add_argument(
            "--split",
            choices=["train", "val", "test", "all"],
            default=split,
            help=f"Dataset split. Defaults to {split}.",
        )


def add_checkpoint_argument(parser: argparse.ArgumentParser, ensemble: bool) -> None:
    parser.add_argument(
        "--checkpoint",
        type=Path,
        nargs="+" if ensemble else None,
        default=None,
        help="Model checkpoint(s). Defaults to OUT/checkpoints/model.zlt.",
    )


def load_config(namespace) -> RunConfig:
    """Falls back to the settings file in the user data dir when --config is absent."""
    path = namespace.config
    if path is None and dirs.settings_path.is_file():
        path = dirs.settings_path
    return RunConfig.load(path, getattr(namespace, "seed", None))


def data_dir(namespace) -> Path:
    return namespace.data if namespace.data is not None else namespace.out / DATA_DIR


def split_of(namespace) -> str | None:
    return None if namespace.split == "all" else namespace.split


def checkpoints(namespace) -> list[Path]:
    if namespace.checkpoint is None:
        paths = [namespace.out / CHECKPOINT_DIR / FINAL_CHECKPOINT]
    elif isinstance(namespace.checkpoint, Path):
        paths = [namespace.checkpoint]
    else:
        paths = list(namespace.checkpoint)

    for path in paths:
        if not path.is_file():
            raise NotFoundError(f"No checkpoint at '{path}'.")
    return paths


def ensure_writable(path: Path, force: bool) -> None:
    """Refuses to write into a non-empty directory unless forced."""
    if path.is_dir() and any(path.iterdir()) and not force:
        raise OutputExistsError(f"Output directory '{path}' is not empty.")


def show_report(report: MetricsReport, iom_threshold: float) -> None:
    if report.heads:
        io.tabulate(REPORT_HEADERS, report.table_rows())
    if report.box_recall.points:
        io.output(
            f"Recall at IoM {iom_threshold}: "
            f"box {report.box_recall.at(iom_threshold):.4f}, "
            f"person {report.person_recall.at(iom_threshold):.4f}"
        )
