from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np

from zoomlens.constants import LEVEL_COUNT
from zoomlens.parsers.csv.base import CSVColumns, write_rows
from zoomlens.parsers.csv.labels import parse_grade

PROBABILITY_COLUMNS = [f"p{level}" for level in range(LEVEL_COUNT)]
COLUMNS = ["image_id", "grade_true", *PROBABILITY_COLUMNS, "grade_pred"]


@dataclass
class PredictionRow:
    image_id: str
    grade_true: int
    probabilities: np.ndarray
    grade_pred: int


def predictions_from_csv(
    path: Path,
    file_kwargs: Optional[dict[str, Any]] = None,
    reader_kwargs: Optional[dict[str, Any]] = None,
) -> tuple[list[PredictionRow], list[str]]:
    rows = []
    errors = []

    with CSVColumns(path, COLUMNS, (), file_kwargs, reader_kwargs) as columns:
        if columns.missing:
            return rows, [columns.missing]

        for line, row in columns.rows():
            try:
                values = columns.values(row)
                rows.append(
                    PredictionRow(
                        values["image_id"],
                        parse_grade(values["grade_true"]),
                        np.array([float(values[p]) for p in PROBABILITY_COLUMNS]),
                        parse_grade(values["grade_pred"]),
                    )
                )
            except (ValueError, IndexError) as exc:
                errors.append(f"line {line} | not a valid prediction: {exc}")

    return rows, errors


def predictions_to_csv(path: Path, rows: list[PredictionRow]) -> None:
    write_rows(
        path,
        COLUMNS,
        (
            [r.image_id, r.grade_true, *(repr(float(p)) for p in r.probabilities), r.grade_pred]
            for r in rows
        ),
    )
