"""
Dense float64 tensors and the per-forward tape used for reverse-mode
differentiation.

Each differentiable operation appends an OpRecord to the thread's current
Graph. Records are appended in execution order, so the list is already
topologically sorted and backward() only needs to walk it in reverse.
"""

from __future__ import annotations

import contextlib
import itertools
import logging
import threading
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from zoomlens.exceptions import (
    InvalidArgumentError,
    InvalidStateError,
    NonFiniteValueError,
)

logger = logging.getLogger(__name__)

_ids = itertools.count()
_local = threading.local()

BackwardFn = Callable[[np.ndarray], Sequence["np.ndarray | None"]]


def check_finite(data: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(data)):
        raise NonFiniteValueError(f"Non-finite value found in {what}.")


class Tensor:
    def __init__(self, data, requires_grad: bool = False, name: str = ""):
        self.data = np.array(data, dtype=np.float64)
        if any(extent <= 0 for extent in self.data.shape):
            raise InvalidArgumentError(
                f"Tensor extents must be positive, got shape {self.data.shape}."
            )
        check_finite(self.data, f"tensor '{name or 'unnamed'}'")
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.graph: Graph | None = None
        self.name = name
        self.id = next(_ids)

    @classmethod
    def _from_result(cls, data: np.ndarray, what: str) -> Tensor:
        """Wraps an op result without copying it."""
        tensor = cls.__new__(cls)
        tensor.data = np.asarray(data, dtype=np.float64)
        check_finite(tensor.data, what)
        tensor.requires_grad = False
        tensor.grad = None
        tensor.graph = None
        tensor.name = ""
        tensor.id = next(_ids)
        return tensor

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> Tensor:
        return Tensor(self.data, name=self.name)

    def backward(self) -> None:
        backward(self)

    def __repr__(self):
        return (
            f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}"
            + (f", name={self.name}" if self.name else "")
            + ")"
        )


@dataclass
class OpRecord:
    kind: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    backward: BackwardFn

    @property
    def input_ids(self) -> tuple[int, ...]:
        return tuple(t.id for t in self.inputs)

    @property
    def output_id(self) -> int:
        return self.output.id


class Graph:
    def __init__(self):
        self.records: list[OpRecord] = []
        self.consumed = False

    def __len__(self):
        return len(self.records)

    def __iter__(self) -> Iterator[OpRecord]:
        return iter(self.records)

    def record(
        self,
        kind: str,
        inputs: tuple[Tensor, ...],
        output: Tensor,
        backward_fn: BackwardFn,
    ) -> None:
        if self.consumed:
            raise InvalidStateError("Can't record on a graph that was already used.")
        self.records.append(OpRecord(kind, inputs, output, backward_fn))
        output.graph = self

    def release(self) -> None:
        """Drops saved activations once the graph has been differentiated."""
        self.consumed = True
        self.records = []


def current_graph() -> Graph:
    graph = getattr(_local, "graph", None)
    if graph is None or graph.consumed:
        graph = Graph()
        _local.graph = graph
    return graph


def reset_graph() -> None:
    """Discards the tape being recorded on this thread."""
    _local.graph = None


def is_grad_enabled() -> bool:
    return getattr(_local, "grad_enabled", True)


@contextlib.contextmanager
def no_grad():
    previous = is_grad_enabled()
    _local.grad_enabled = False
    try:
        yield
    finally:
        _local.grad_enabled = previous


def make_result(
    kind: str,
    data: np.ndarray,
    inputs: tuple[Tensor, ...],
    backward_fn: BackwardFn,
) -> Tensor:
    out = Tensor._from_result(data, f"output of {kind}")
    if is_grad_enabled() and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        current_graph().record(kind, inputs, out, backward_fn)
    return out


def backward(loss: Tensor) -> None:
    if loss.data.size != 1:
        raise InvalidArgumentError(
            f"backward needs a scalar loss, got shape {loss.shape}."
        )

    graph = loss.graph
    if graph is None or graph.consumed:
        raise InvalidStateError(
            "backward called on a tensor that is not part of a recorded graph."
        )

    grads: dict[int, np.ndarray] = {loss.id: np.ones_like(loss.data)}
    tensors: dict[int, Tensor] = {loss.id: loss}

    for record in reversed(graph.records):
        grad_out = grads.pop(record.output_id, None)
        if grad_out is None:
            continue
        record.output.grad = grad_out

        input_grads = record.backward(grad_out)
        for tensor, grad in zip(record.inputs, input_grads):
            if grad is None or not tensor.requires_grad:
                continue
            check_finite(grad, f"gradient of {record.kind}")
            if tensor.id in grads:
                grads[tensor.id] = grads[tensor.id] + grad
            else:
                grads[tensor.id] = grad
                tensors[tensor.id] = tensor

    # whatever is left belongs to leaves: parameters and inputs
    for tensor_id, grad in grads.items():
        leaf = tensors[tensor_id]
        leaf.grad = grad.copy() if leaf.grad is None else leaf.grad + grad

    graph.release()
    if getattr(_local, "graph", None) is graph:
        reset_graph()
