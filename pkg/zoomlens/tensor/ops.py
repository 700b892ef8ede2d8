from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.tensor.tensor import Tensor, make_result


def _require_same_shape(kind: str, tensors: Sequence[Tensor]) -> None:
    first = tensors[0].shape
    for tensor in tensors[1:]:
        if tensor.shape != first:
            raise InvalidArgumentError(
                f"{kind} operands must share one shape, got {first} and {tensor.shape}."
            )


def _windows(padded: np.ndarray, kernel: int, stride: int) -> np.ndarray:
    # N, C, Ho, Wo, k, k view over the padded input
    view = sliding_window_view(padded, (kernel, kernel), axis=(2, 3))
    return view[:, :, ::stride, ::stride]


def conv2d(
    input: Tensor, weight: Tensor, bias: Tensor, stride: int = 1, pad: int = 0
) -> Tensor:
    if input.ndim != 4:
        raise InvalidArgumentError(
            f"conv2d input must be NCHW, got {input.ndim} dimensions."
        )
    if weight.ndim != 4 or weight.shape[2] != weight.shape[3]:
        raise InvalidArgumentError(
            f"conv2d weight must be O x C x k x k, got shape {weight.shape}."
        )
    out_channels, in_channels, kernel, _ = weight.shape
    if in_channels != input.shape[1]:
        raise InvalidArgumentError(
            f"conv2d channel dimension mismatch: input has {input.shape[1]}, "
            f"weight expects {in_channels}."
        )
    if bias.shape != (out_channels,):
        raise InvalidArgumentError(
            f"conv2d bias dimension mismatch: expected ({out_channels},), "
            f"got {bias.shape}."
        )
    if stride < 1 or pad < 0:
        raise InvalidArgumentError("conv2d needs stride >= 1 and pad >= 0.")

    n, _, height, width = input.shape
    for dim_name, extent in (("height", height), ("width", width)):
        if extent + 2 * pad < kernel:
            raise InvalidArgumentError(
                f"conv2d {dim_name} {extent} with pad {pad} is smaller than "
                f"kernel {kernel}."
            )

    padded = np.pad(input.data, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    windows = _windows(padded, kernel, stride)
    out_h, out_w = windows.shape[2], windows.shape[3]

    out = np.tensordot(windows, weight.data, axes=([1, 4, 5], [1, 2, 3]))
    out = out.transpose(0, 3, 1, 2) + bias.data[None, :, None, None]

    def backward(grad: np.ndarray):
        grad_weight = np.tensordot(grad, windows, axes=([0, 2, 3], [0, 2, 3]))
        grad_bias = grad.sum(axis=(0, 2, 3))

        # N, Ho, Wo, C, k, k
        grad_windows = np.tensordot(grad, weight.data, axes=([1], [0]))
        grad_padded = np.zeros_like(padded)
        for i in range(kernel):
            for j in range(kernel):
                grad_padded[
                    :,
                    :,
                    i : i + stride * out_h : stride,
                    j : j + stride * out_w : stride,
                ] += grad_windows[:, :, :, :, i, j].transpose(0, 3, 1, 2)
        grad_input = grad_padded[:, :, pad : pad + height, pad : pad + width]

        return grad_input, grad_weight, grad_bias

    return make_result("conv2d", np.ascontiguousarray(out), (input, weight, bias), backward)


def linear(input: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    if input.ndim != 2 or weight.ndim != 2:
        raise InvalidArgumentError(
            f"linear expects N x D input and K x D weight, got {input.shape} "
            f"and {weight.shape}."
        )
    if input.shape[1] != weight.shape[1]:
        raise InvalidArgumentError(
            f"linear inner dimension mismatch: input D={input.shape[1]}, "
            f"weight D={weight.shape[1]}."
        )
    if bias.shape != (weight.shape[0],):
        raise InvalidArgumentError(
            f"linear bias dimension mismatch: expected ({weight.shape[0]},), "
            f"got {bias.shape}."
        )

    out = input.data @ weight.data.T + bias.data

    def backward(grad: np.ndarray):
        return grad @ weight.data, grad.T @ input.data, grad.sum(axis=0)

    return make_result("linear", out, (input, weight, bias), backward)


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0

    def backward(grad: np.ndarray):
        return (grad * mask,)

    return make_result("relu", np.where(mask, x.data, 0.0), (x,), backward)


def add(*tensors: Tensor) -> Tensor:
    if not tensors:
        raise InvalidArgumentError("add needs at least one operand.")
    _require_same_shape("add", tensors)

    out = tensors[0].data.copy()
    for tensor in tensors[1:]:
        out = out + tensor.data

    def backward(grad: np.ndarray):
        return tuple(grad for _ in tensors)

    return make_result("add", out, tuple(tensors), backward)


def elementwise_mul(a: Tensor, b: Tensor) -> Tensor:
    _require_same_shape("elementwise_mul", (a, b))

    def backward(grad: np.ndarray):
        return grad * b.data, grad * a.data

    return make_result("elementwise_mul", a.data * b.data, (a, b), backward)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not tensors:
        raise InvalidArgumentError("concat needs at least one operand.")
    ndim = tensors[0].ndim
    axis = axis % ndim
    for tensor in tensors[1:]:
        if tensor.ndim != ndim or any(
            tensor.shape[d] != tensors[0].shape[d] for d in range(ndim) if d != axis
        ):
            raise InvalidArgumentError(
                f"concat operands must agree off axis {axis}, got "
                f"{tensors[0].shape} and {tensor.shape}."
            )

    bounds = np.cumsum([0] + [t.shape[axis] for t in tensors])

    def backward(grad: np.ndarray):
        return tuple(
            np.take(grad, np.arange(bounds[i], bounds[i + 1]), axis=axis)
            for i in range(len(tensors))
        )

    out = np.concatenate([t.data for t in tensors], axis=axis)
    return make_result("concat", out, tuple(tensors), backward)


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    original = x.shape

    def backward(grad: np.ndarray):
        return (grad.reshape(original),)

    return make_result("reshape", x.data.reshape(shape), (x,), backward)


def sum_all(x: Tensor) -> Tensor:
    def backward(grad: np.ndarray):
        return (np.full_like(x.data, grad.reshape(-1)[0]),)

    return make_result("sum_all", np.array(x.data.sum()), (x,), backward)


def sum_axes(x: Tensor, axes: tuple[int, ...]) -> Tensor:
    axes = tuple(a % x.ndim for a in axes)

    def backward(grad: np.ndarray):
        return (np.broadcast_to(np.expand_dims(grad, axes), x.shape).copy(),)

    return make_result("sum_axes", x.data.sum(axis=axes), (x,), backward)


def global_avg_pool(x: Tensor) -> Tensor:
    """N x C x H x W -> N x C"""
    if x.ndim != 4:
        raise InvalidArgumentError(f"global_avg_pool expects NCHW, got {x.shape}.")
    area = x.shape[2] * x.shape[3]

    def backward(grad: np.ndarray):
        return (np.broadcast_to(grad[:, :, None, None] / area, x.shape).copy(),)

    return make_result("global_avg_pool", x.data.mean(axis=(2, 3)), (x,), backward)


def max_elementwise(tensors: Sequence[Tensor]) -> Tensor:
    """Element-wise max. Ties go to the earliest operand."""
    if not tensors:
        raise InvalidArgumentError("max_elementwise needs at least one operand.")
    _require_same_shape("max_elementwise", tensors)

    stacked = np.stack([t.data for t in tensors])
    winner = np.argmax(stacked, axis=0)
    out = np.take_along_axis(stacked, winner[None], axis=0)[0]

    def backward(grad: np.ndarray):
        return tuple(np.where(winner == k, grad, 0.0) for k in range(len(tensors)))

    return make_result("max_elementwise", out, tuple(tensors), backward)


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    exps = np.exp(shifted)
    out = exps / exps.sum(axis=axis, keepdims=True)

    def backward(grad: np.ndarray):
        return (out * (grad - (grad * out).sum(axis=axis, keepdims=True)),)

    return make_result("softmax", out, (x,), backward)


def softmax_vector(logits: Tensor) -> Tensor:
    probs = softmax(logits, axis=-1)
    probs.softmax_logits = logits
    return probs


def cross_entropy(probs: Tensor, label: int) -> Tensor:
    """-log p[label] for a single L or 1 x L probability vector."""
    level_count = probs.shape[-1]
    if probs.data.size != level_count:
        raise InvalidArgumentError(
            f"cross_entropy expects one probability vector, got shape {probs.shape}."
        )
    if not (isinstance(label, (int, np.integer)) and 0 <= label < level_count):
        raise InvalidArgumentError(
            f"cross_entropy label {label} is outside [0, {level_count})."
        )

    logits = getattr(probs, "softmax_logits", None)
    if logits is not None:
        flat = logits.data.reshape(-1)
        shifted = flat - flat.max()
        log_z = np.log(np.exp(shifted).sum())
        loss = log_z - shifted[label]
        p = probs.data.reshape(-1)

        def backward_fused(grad: np.ndarray):
            onehot = np.zeros(level_count)
            onehot[label] = 1.0
            return ((grad.reshape(-1)[0] * (p - onehot)).reshape(logits.shape),)

        return make_result("cross_entropy", np.array(loss), (logits,), backward_fused)

    p = probs.data.reshape(-1)

    def backward(grad: np.ndarray):
        g = np.zeros(level_count)
        g[label] = -grad.reshape(-1)[0] / p[label]
        return (g.reshape(probs.shape),)

    return make_result("cross_entropy", np.array(-np.log(p[label])), (probs,), backward)
