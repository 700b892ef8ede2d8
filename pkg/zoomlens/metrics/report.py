from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.metrics.binary import BinaryTask, binary_accuracy, binary_scores
from zoomlens.metrics.kappa import quadratic_weighted_kappa
from zoomlens.metrics.localization import RecallCurve
from zoomlens.metrics.roc import roc_auc, sensitivity_at_specificity


@dataclass
class BinaryMetrics:
    auc: float | None = None
    accuracy: float | None = None
    sensitivity: float | None = None


@dataclass
class HeadMetrics:
    kappa: float
    referable: BinaryMetrics = field(default_factory=BinaryMetrics)
    normal: BinaryMetrics = field(default_factory=BinaryMetrics)


def binary_metrics(
    probabilities: Sequence[np.ndarray],
    grades: Sequence[int],
    task: BinaryTask,
    specificity: float = 0.5,
) -> BinaryMetrics:
    """AUC and sensitivity are left empty when one class is missing."""
    scores = [binary_scores(y, task) for y in probabilities]
    labels = task.labels(grades)
    result = BinaryMetrics(accuracy=binary_accuracy(scores, labels))
    if 0 < labels.sum() < labels.size:
        result.auc = roc_auc(scores, labels)
        result.sensitivity = sensitivity_at_specificity(scores, labels, specificity)
    return result


def head_metrics(
    probabilities: Sequence[np.ndarray],
    grades: Sequence[int],
    specificity: float = 0.5,
) -> HeadMetrics:
    preds = [int(np.argmax(y)) for y in probabilities]
    return HeadMetrics(
        kappa=quadratic_weighted_kappa(grades, preds),
        referable=binary_metrics(probabilities, grades, BinaryTask.REFERABLE, specificity),
        normal=binary_metrics(probabilities, grades, BinaryTask.NORMAL, specificity),
    )


@dataclass
class MetricsReport:
    sample_count: int = 0
    heads: dict[str, HeadMetrics] = field(default_factory=dict)
    box_recall: RecallCurve = field(default_factory=RecallCurve)
    person_recall: RecallCurve = field(default_factory=RecallCurve)
    checkpoints: list[str] = field(default_factory=list)

    def kappa(self, head: str) -> float:
        try:
            return self.heads[head].kappa
        except KeyError:
            raise InvalidArgumentError(f"No metrics for head '{head}'.")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> MetricsReport:
        heads = {
            name: HeadMetrics(
                kappa=values["kappa"],
                referable=BinaryMetrics(**values["referable"]),
                normal=BinaryMetrics(**values["normal"]),
            )
            for name, values in data.get("heads", {}).items()
        }
        return cls(
            sample_count=data.get("sample_count", 0),
            heads=heads,
            box_recall=RecallCurve([tuple(p) for p in data["box_recall"]["points"]]),
            person_recall=RecallCurve(
                [tuple(p) for p in data["person_recall"]["points"]]
            ),
            checkpoints=list(data.get("checkpoints", [])),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> MetricsReport:
        return cls.from_dict(json.loads(text))

    def write(self, json_path: Path, curves_path: Path | None = None) -> None:
        json_path.write_text(self.to_json(), encoding="utf-8")
        if curves_path is not None:
            self.write_curves(curves_path)

    def write_curves(self, path: Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["threshold", "box_recall", "person_recall"])
            for (t, box), (_, person) in zip(
                self.box_recall.points, self.person_recall.points
            ):
                writer.writerow([t, box, person])

    def table_rows(self) -> list[list[str]]:
        def fmt(value):
            if value is None or (isinstance(value, float) and math.isnan(value)):
                return "-"
            return f"{value:.4f}"

        return [
            [
                name,
                fmt(head.kappa),
                fmt(head.referable.auc),
                fmt(head.referable.sensitivity),
                fmt(head.referable.accuracy),
                fmt(head.normal.auc),
                fmt(head.normal.sensitivity),
                fmt(head.normal.accuracy),
            ]
            for name, head in self.heads.items()
        ]
