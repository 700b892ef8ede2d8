from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from zoomlens.tensor.tensor import Tensor, backward, no_grad


def numerical_gradient(
    f: Callable[[], Tensor],
    tensor: Tensor,
    h: float = 1e-5,
    entries: Sequence[int] | None = None,
) -> np.ndarray:
    """
    Central differences of the scalar f() with respect to 'tensor'. With
    'entries' given, only those flat indices are checked and the rest of the
    result stays zero.
    """
    grad = np.zeros_like(tensor.data)
    flat = tensor.data.reshape(-1)
    grad_flat = grad.reshape(-1)
    indices = range(flat.size) if entries is None else entries
    with no_grad():
        for i in indices:
            original = flat[i]
            flat[i] = original + h
            plus = f().item()
            flat[i] = original - h
            minus = f().item()
            flat[i] = original
            grad_flat[i] = (plus - minus) / (2 * h)
    return grad


def analytic_gradients(f: Callable[[], Tensor], tensors: list[Tensor]) -> list[np.ndarray]:
    for tensor in tensors:
        tensor.zero_grad()
    backward(f())
    return [
        tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
        for tensor in tensors
    ]


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(np.abs(analytic).max(), np.abs(numeric).max(), 1e-8)
    return float(np.abs(analytic - numeric).max() / scale)


def max_relative_error(
    f: Callable[[], Tensor],
    tensors: list[Tensor],
    h: float = 1e-5,
    max_entries: int | None = None,
    seed: int = 0,
) -> float:
    """
    Worst relative error between backward() and central differences. With
    'max_entries', at most that many randomly chosen entries per tensor are
    compared.
    """
    analytic = analytic_gradients(f, tensors)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for a, tensor in zip(analytic, tensors):
        size = tensor.data.size
        if max_entries is None or size <= max_entries:
            entries = np.arange(size)
        else:
            entries = np.sort(rng.choice(size, max_entries, replace=False))
        numeric = numerical_gradient(f, tensor, h, entries)
        worst = max(
            worst,
            relative_error(a.reshape(-1)[entries], numeric.reshape(-1)[entries]),
        )
    return worst
