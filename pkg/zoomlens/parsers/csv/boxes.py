from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Any, Optional

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.parsers.csv.base import CSVColumns, write_rows
from zoomlens.sampler import BBox

LESION_COLUMNS = ["image_id", "kind", "x", "y", "w", "h"]
REGION_COLUMNS = ["image_id", "rank", "cx", "cy", "value", "x", "y", "w", "h"]

BOX_ERRORS = (ValueError, IndexError, InvalidArgumentError)


def _parse_box(columns: CSVColumns, row: list[str]) -> BBox:
    return BBox(*(int(columns.get(row, side)) for side in ("x", "y", "w", "h")))


def boxes_from_csv(
    path: Path,
    file_kwargs: Optional[dict[str, Any]] = None,
    reader_kwargs: Optional[dict[str, Any]] = None,
) -> tuple[dict[str, list[tuple[str, BBox]]], list[str]]:
    """
    Reads ground-truth lesions (image_id,kind,x,y,w,h) grouped by image.
    Returns the boxes and descriptions of the rows that were skipped.
    """
    boxes = defaultdict(list)
    errors = []

    with CSVColumns(path, LESION_COLUMNS, (), file_kwargs, reader_kwargs) as columns:
        if columns.missing:
            return {}, [columns.missing]

        for line, row in columns.rows():
            try:
                box = _parse_box(columns, row)
            except BOX_ERRORS as exc:
                errors.append(f"line {line} | not a valid box: {exc}")
                continue
            boxes[columns.get(row, "image_id")].append((columns.get(row, "kind"), box))

    return dict(boxes), errors


def boxes_to_csv(path: Path, boxes: dict[str, list[tuple[str, BBox]]]) -> None:
    write_rows(
        path,
        LESION_COLUMNS,
        (
            [image_id, kind, *box.to_tuple()]
            for image_id, items in boxes.items()
            for kind, box in items
        ),
    )


def regions_from_csv(
    path: Path,
    file_kwargs: Optional[dict[str, Any]] = None,
    reader_kwargs: Optional[dict[str, Any]] = None,
) -> tuple[dict[str, list[BBox]], list[str]]:
    """Reads sampled regions (image_id,rank,cx,cy,value,x,y,w,h) as boxes ordered by rank."""
    ranked = defaultdict(list)
    errors = []

    with CSVColumns(path, REGION_COLUMNS, (), file_kwargs, reader_kwargs) as columns:
        if columns.missing:
            return {}, [columns.missing]

        for line, row in columns.rows():
            try:
                rank = int(columns.get(row, "rank"))
                box = _parse_box(columns, row)
            except BOX_ERRORS as exc:
                errors.append(f"line {line} | not a valid region: {exc}")
                continue
            ranked[columns.get(row, "image_id")].append((rank, box))

    regions = {
        image_id: [box for _, box in sorted(items, key=lambda item: item[0])]
        for image_id, items in ranked.items()
    }
    return regions, errors


def regions_to_csv(path: Path, rows: list[list[Any]]) -> None:
    write_rows(path, REGION_COLUMNS, rows)
