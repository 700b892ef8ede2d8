"""
Writing generated datasets to disk and loading image + CSV datasets back
as eye pairs.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from zoomlens.exceptions import NotFoundError
from zoomlens.fundus.lesions import Lesion, LesionKind
from zoomlens.fundus.pairs import generate_indexed_pair
from zoomlens.fundus.preprocess import prepare_eye
from zoomlens.fundus.sample import Eye, FundusSample, write_png
from zoomlens.model import EyePairBatch
from zoomlens.parsers.csv.boxes import boxes_from_csv, boxes_to_csv
from zoomlens.parsers.csv.labels import LabelRow, labels_from_csv, labels_to_csv
from zoomlens.requests import Post, post
from zoomlens.sampler import BBox
from zoomlens.utils import get_worker_count, hash_function

logger = logging.getLogger(__name__)

IMAGES_DIR = "images"
LABELS_FILE = "labels.csv"
LESIONS_FILE = "lesions.csv"


@dataclass
class FundusPair:
    """One patient: both eyes, or a single eye when its sibling is missing."""

    patient_id: str
    eyes: list[FundusSample]
    split: str | None = None

    @property
    def has_sibling(self) -> bool:
        return len(self.eyes) == 2


@dataclass
class FundusDataset:
    pairs: list[FundusPair] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def samples(self) -> list[FundusSample]:
        return [sample for pair in self.pairs for sample in pair.eyes]

    def __len__(self):
        return len(self.pairs)

    def split(self, name: str | None, val_fraction: float, test_fraction: float):
        if name is None:
            return self
        return FundusDataset(
            [
                p
                for p in self.pairs
                if (p.split or split_of(p.patient_id, val_fraction, test_fraction)) == name
            ],
            self.errors,
        )


def split_of(patient_id: str, val_fraction: float, test_fraction: float) -> str:
    """Deterministic split for datasets that don't name one."""
    position = int(hash_function(patient_id)[:8], 16) / 0x100000000
    if position < test_fraction:
        return "test"
    if position < test_fraction + val_fraction:
        return "val"
    return "train"


def split_for_index(index: int, train_pairs: int, val_fraction: float) -> str:
    if index >= train_pairs:
        return "test"
    return "val" if index >= round(train_pairs * (1 - val_fraction)) else "train"


def write_dataset(
    out_dir: Path,
    seed: int,
    train_pairs: int,
    test_pairs: int,
    val_fraction: float = 0.1,
    size: int = 320,
) -> FundusDataset:
    """
    Renders train_pairs + test_pairs pairs into out_dir/images and writes
    labels.csv and lesions.csv. Pairs are rendered on worker threads; the
    result doesn't depend on their count.
    """
    images_dir = out_dir / IMAGES_DIR
    images_dir.mkdir(parents=True, exist_ok=True)
    total = train_pairs + test_pairs

    def make(index: int) -> FundusPair:
        eyes = []
        for sample in generate_indexed_pair(seed, index, size):
            path = images_dir / f"{sample.image_id}.png"
            write_png(path, sample.image)
            eyes.append(sample.without_pixels(path))
        return FundusPair(
            eyes[0].patient_id, eyes, split_for_index(index, train_pairs, val_fraction)
        )

    with ThreadPoolExecutor(max_workers=get_worker_count()) as executor:
        pairs = list(executor.map(make, range(total)))

    labels = []
    lesions = {}
    for pair in pairs:
        for sample in pair.eyes:
            labels.append(
                LabelRow(
                    f"{IMAGES_DIR}/{sample.path.name}",
                    sample.patient_id,
                    sample.eye.value,
                    sample.grade,
                    pair.split,
                )
            )
            lesions[sample.image_id] = [(l.kind.value, l.box) for l in sample.lesions]

    labels_to_csv(out_dir / LABELS_FILE, labels)
    boxes_to_csv(out_dir / LESIONS_FILE, lesions)
    logger.info(f"Wrote {total} pairs to '{out_dir}'.")
    return FundusDataset(pairs)


def _check_image(path: Path) -> str | None:
    try:
        with Image.open(path) as img:
            img.verify()
    except FileNotFoundError:
        return f"'{path}' does not exist."
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        return f"'{path}' can't be decoded: {exc}"
    return None


def _lesions_for(image_id: str, boxes: dict, errors: list[str]) -> list[Lesion]:
    lesions = []
    for kind, box in boxes.get(image_id, []):
        try:
            lesions.append(Lesion(LesionKind(kind), box))
        except ValueError:
            errors.append(f"{image_id} | {kind!r} is not a lesion kind.")
    return lesions


def load_dataset(
    image_dir: Path, labels_csv: Path, lesions_csv: Path | None = None
) -> FundusDataset:
    """
    Groups rows by patient id into eye pairs. Unreadable images and bad rows
    are reported in FundusDataset.errors and skipped. A patient with a single
    usable eye becomes a single-eye pair.
    """
    if not labels_csv.exists():
        raise NotFoundError(f"No labels file at '{labels_csv}'.")

    rows, errors = labels_from_csv(labels_csv)
    boxes = {}
    if lesions_csv is not None and lesions_csv.exists():
        boxes, box_errors = boxes_from_csv(lesions_csv)
        errors += box_errors

    by_patient: dict[str, dict[str, tuple[FundusSample, str | None]]] = defaultdict(dict)
    for row in rows:
        path = image_dir / row.image
        if error := _check_image(path):
            errors.append(f"{row.image} | {error}")
            continue
        if row.eye in by_patient[row.patient_id]:
            errors.append(f"{row.image} | duplicate {row.eye} eye for {row.patient_id}.")
            continue
        eye = Eye(row.eye)
        image_id = f"{row.patient_id}_{eye.value}"
        sample = FundusSample(
            image=None,
            grade=row.grade,
            lesions=_lesions_for(image_id, boxes, errors),
            patient_id=row.patient_id,
            eye=eye,
            path=path,
        )
        by_patient[row.patient_id][row.eye] = (sample, row.split)

    pairs = []
    for patient_id in sorted(by_patient):
        found = by_patient[patient_id]
        eyes = [found[eye][0] for eye in ("left", "right") if eye in found]
        split = next((found[eye][1] for eye in ("left", "right") if eye in found), None)
        if eyes:
            pairs.append(FundusPair(patient_id, eyes, split))

    for error in errors:
        post(Post.DATASET_ROW_ERROR, error)
    if errors:
        logger.warning(f"{len(errors)} problem(s) while loading '{labels_csv}'.")
    logger.info(f"Loaded {len(pairs)} pairs from '{labels_csv}'.")
    return FundusDataset(pairs, errors)


@dataclass
class PreparedPair:
    low: EyePairBatch
    high: EyePairBatch
    boxes: list[list[BBox]]
    samples: list[FundusSample]


def prepare_pair(
    pair: FundusPair,
    input_size: int,
    high_res_size: int,
    threshold: float = 0.02,
    rng: np.random.Generator | None = None,
) -> PreparedPair:
    """Model-ready low- and high-resolution batches for one pair."""
    prepared = [
        prepare_eye(
            sample.pixels(), sample.boxes, input_size, high_res_size, threshold, rng
        )
        for sample in pair.eyes
    ]
    grades = [sample.grade for sample in pair.eyes]
    right = 1 if pair.has_sibling else None

    def batch(resolution: str) -> EyePairBatch:
        images = [getattr(eye, resolution) for eye in prepared]
        return EyePairBatch(
            images[0],
            images[right] if right else None,
            grades[0],
            grades[right] if right else None,
            pair.patient_id,
        )

    return PreparedPair(
        batch("low"), batch("high"), [eye.boxes for eye in prepared], list(pair.eyes)
    )
