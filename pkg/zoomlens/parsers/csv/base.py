from __future__ import annotations

import csv
from pathlib import Path
from typing import Any, Iterable, Iterator, Optional

from zoomlens.requests.post import post, Post


def get_params_indices(params: list[str], headers: list[str]) -> dict[str, int]:
    """Maps each of 'params' found in 'headers' to its first index there."""
    return {p: headers.index(p) for p in params if p in headers}


def missing_column(
    required: list[str], params_to_indices: dict[str, int], path: Path
) -> str | None:
    """
    Returns an error for the first of 'required' that has no index, posting it
    for display as well. Returns None when every column is there.
    """
    for param in required:
        if param not in params_to_indices:
            post(
                Post.DISPLAY_ERROR,
                "Import error",
                f"Column '{param}' not found on first row of '{path}'.",
            )
            return f"Column '{param}' not found in '{path}'."
    return None


class CSVColumns:
    """
    Opens a CSV with a header row and looks its columns up by name.

        with CSVColumns(path, ["a", "b"]) as columns:
            if columns.missing:
                ...
            for line, row in columns.rows():
                columns.get(row, "a")
    """

    def __init__(
        self,
        path: Path,
        required: list[str],
        optional: Iterable[str] = (),
        file_kwargs: Optional[dict[str, Any]] = None,
        reader_kwargs: Optional[dict[str, Any]] = None,
    ):
        self.path = path
        self.required = list(required)
        self.optional = list(optional)
        self.file_kwargs = {"encoding": "utf-8"} | (file_kwargs or {})
        self.reader_kwargs = reader_kwargs or {}
        self.indices: dict[str, int] = {}
        self.missing: str | None = None

    def __enter__(self) -> CSVColumns:
        self.file = open(self.path, newline="", **self.file_kwargs)
        self.reader = csv.reader(self.file, **self.reader_kwargs)
        header = [name.strip() for name in next(self.reader, [])]
        self.indices = get_params_indices(self.required + self.optional, header)
        self.missing = missing_column(self.required, self.indices, self.path)
        return self

    def __exit__(self, exc_type, exc_value, exc_traceback):
        self.file.close()

    def rows(self) -> Iterator[tuple[int, list[str]]]:
        """Yields (line number, row), skipping blank rows. Data starts on line 2."""
        for line, row in enumerate(self.reader, start=2):
            if any(cell.strip() for cell in row):
                yield line, row

    def get(self, row: list[str], column: str) -> str:
        """Raises IndexError if 'row' is too short to hold 'column'."""
        return row[self.indices[column]].strip()

    def values(self, row: list[str]) -> dict[str, str]:
        return {column: self.get(row, column) for column in self.indices}


def write_rows(path: Path, header: list[str], rows: Iterable[list[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)
