from __future__ import annotations

from typing import Sequence

import prettytable


def output(message: str) -> None:
    print(message)


def tabulate(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    """Prints 'rows' under 'headers'. Every column but the first is right-aligned."""
    table = prettytable.PrettyTable(list(headers))
    for header in headers[1:]:
        table.align[header] = "r"
    table.add_rows(rows)
    output(table.get_string())
