"""
Reads and writes the ZLT1 checkpoint format: an ASCII header made of the
magic line, one "name ndim d0 ... dk" line per tensor and a blank line,
followed by the little-endian float64 payloads in header order.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import numpy as np

from zoomlens.constants import CHECKPOINT_MAGIC
from zoomlens.exceptions import InvalidArgumentError, NotFoundError
from zoomlens.tensor.tensor import Tensor


def _as_array(value: Tensor | np.ndarray) -> np.ndarray:
    return value.data if isinstance(value, Tensor) else np.asarray(value, np.float64)


def dumps(tensors: Mapping[str, Tensor | np.ndarray]) -> bytes:
    header = [CHECKPOINT_MAGIC]
    payloads = []
    for name, value in tensors.items():
        if not name or any(c.isspace() for c in name):
            raise InvalidArgumentError(f"Invalid tensor name for checkpoint: {name!r}")
        array = _as_array(value)
        header.append(" ".join([name, str(array.ndim), *map(str, array.shape)]))
        payloads.append(np.ascontiguousarray(array, dtype="<f8").tobytes())

    return ("\n".join(header) + "\n\n").encode("ascii") + b"".join(payloads)


def loads(raw: bytes) -> dict[str, np.ndarray]:
    try:
        header_end = raw.index(b"\n\n")
    except ValueError:
        raise InvalidArgumentError("Checkpoint header is not terminated.")

    lines = raw[:header_end].decode("ascii").split("\n")
    if lines[0] != CHECKPOINT_MAGIC:
        raise InvalidArgumentError(f"Bad checkpoint magic: {lines[0]!r}")

    offset = header_end + 2
    result = {}
    for line in lines[1:]:
        name, ndim, *dims = line.split(" ")
        shape = tuple(int(d) for d in dims)
        if len(shape) != int(ndim):
            raise InvalidArgumentError(f"Malformed checkpoint header line: {line!r}")
        count = int(np.prod(shape, dtype=np.int64))
        end = offset + 8 * count
        if end > len(raw):
            raise InvalidArgumentError(f"Checkpoint payload truncated at '{name}'.")
        result[name] = (
            np.frombuffer(raw[offset:end], dtype="<f8").astype(np.float64).reshape(shape)
        )
        offset = end

    if offset != len(raw):
        raise InvalidArgumentError("Checkpoint has trailing bytes after payloads.")

    return result


def save(path: Path | str, tensors: Mapping[str, Tensor | np.ndarray]) -> None:
    with open(path, "wb") as f:
        f.write(dumps(tensors))


def load(path: Path | str) -> dict[str, np.ndarray]:
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except FileNotFoundError:
        raise NotFoundError(f"No checkpoint at '{path}'.")

    return loads(raw)
