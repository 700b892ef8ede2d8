from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from zoomlens.constants import GRADES
from zoomlens.parsers.csv.base import CSVColumns, write_rows

REQUIRED = ["image", "patient_id", "eye", "grade"]
OPTIONAL = ["split"]
EYES = ("left", "right")
SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class LabelRow:
    image: str
    patient_id: str
    eye: str
    grade: int
    split: str | None = None


def parse_grade(value: str) -> int:
    grade = int(value)
    if grade not in GRADES:
        raise ValueError(f"APPEND:Grades go from 0 to {GRADES[-1]}.")
    return grade


def labels_from_csv(
    path: Path,
    file_kwargs: Optional[dict[str, Any]] = None,
    reader_kwargs: Optional[dict[str, Any]] = None,
) -> tuple[list[LabelRow], list[str]]:
    """
    Reads an image,patient_id,eye,grade[,split] CSV.
    Rows that can't be parsed are left out and described in the returned
    list of errors.
    """
    rows = []
    errors = []

    with CSVColumns(path, REQUIRED, OPTIONAL, file_kwargs, reader_kwargs) as columns:
        if columns.missing:
            return rows, [columns.missing]

        for line, row in columns.rows():
            try:
                values = columns.values(row)
            except IndexError:
                errors.append(f"line {line} | missing values")
                continue

            try:
                grade = parse_grade(values["grade"])
            except ValueError as exc:
                appended = str(exc).replace("APPEND:", "") if "APPEND:" in str(exc) else ""
                errors.append(
                    f"line {line} | {values['grade']!r} is not a valid grade. {appended}"
                )
                continue

            if values["eye"] not in EYES:
                errors.append(f"line {line} | {values['eye']!r} is not a valid eye.")
                continue

            split = values.get("split") or None
            if split is not None and split not in SPLITS:
                errors.append(f"line {line} | {split!r} is not a valid split.")
                continue

            if not values["image"] or not values["patient_id"]:
                errors.append(f"line {line} | image and patient_id can't be empty.")
                continue

            rows.append(
                LabelRow(values["image"], values["patient_id"], values["eye"], grade, split)
            )

    return rows, errors


def labels_to_csv(path: Path, rows: list[LabelRow]) -> None:
    write_rows(
        path,
        REQUIRED + OPTIONAL,
        ([r.image, r.patient_id, r.eye, r.grade, r.split or ""] for r in rows),
    )
