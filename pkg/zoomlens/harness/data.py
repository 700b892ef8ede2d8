from __future__ import annotations

from pathlib import Path

from zoomlens.constants import MANIFEST_FILE_NAME
from zoomlens.exceptions import NotFoundError
from zoomlens.fundus import FundusDataset, load_dataset, write_dataset
from zoomlens.fundus.dataset import LABELS_FILE, LESIONS_FILE
from zoomlens.harness.config import RunConfig
from zoomlens.harness.manifest import RunManifest

CONFIG_FILE = "config.toml"


def generate_data(config: RunConfig, out_dir: Path) -> FundusDataset:
    """Renders the synthetic dataset and records its seed and config hash."""
    dataset = write_dataset(
        out_dir,
        config.seed,
        config.train_pairs,
        config.test_pairs,
        config.val_fraction,
        config.render_size,
    )
    manifest = RunManifest(config.config_hash(), config.seed, stages=["gen-data"])
    manifest.save(out_dir / MANIFEST_FILE_NAME)
    (out_dir / CONFIG_FILE).write_text(config.to_toml(), encoding="utf-8")
    return dataset


def load_data(config: RunConfig, data_dir: Path | None, split: str | None = None):
    """
    Loads the dataset named by data.image_dir / data.labels_csv or, when
    those are empty, the generated one in 'data_dir'.
    """
    if config.labels_csv:
        image_dir = Path(config.image_dir or Path(config.labels_csv).parent)
        labels = Path(config.labels_csv)
        lesions = labels.parent / LESIONS_FILE
    elif data_dir is not None:
        image_dir = data_dir
        labels = data_dir / LABELS_FILE
        lesions = data_dir / LESIONS_FILE
    else:
        raise NotFoundError("No dataset given. Pass --data or set data.labels_csv.")

    dataset = load_dataset(image_dir, labels, lesions)
    return dataset.split(split, config.val_fraction, config.test_fraction)
