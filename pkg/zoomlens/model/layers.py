"""
Parameter holders and the convolutional trunk shared by M-Net and C-Net.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from zoomlens.exceptions import CheckpointMismatchError, InvalidArgumentError
from zoomlens.tensor import Tensor, conv2d, global_avg_pool, linear, relu


class Module:
    """
    Owns named parameters. Parameters are collected from attributes in the
    order they were assigned, recursing into sub-modules and lists of them.
    """

    def named_parameters(self, prefix: str = "") -> dict[str, Tensor]:
        params = {}
        for attr, value in vars(self).items():
            name = f"{prefix}{attr}"
            if isinstance(value, Tensor) and value.requires_grad:
                params[name] = value
            elif isinstance(value, Module):
                params.update(value.named_parameters(f"{name}."))
            elif isinstance(value, list):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        params.update(item.named_parameters(f"{name}.{i}."))
        return params

    def parameters(self) -> Iterator[Tensor]:
        return iter(self.named_parameters().values())

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters().items()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        params = self.named_parameters()
        mismatched = set(params) ^ set(state)
        mismatched |= {
            name
            for name in set(params) & set(state)
            if params[name].shape != np.shape(state[name])
        }
        if mismatched:
            raise CheckpointMismatchError(list(mismatched))

        for name, param in params.items():
            param.data[...] = state[name]


def kaiming_normal(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int):
    return rng.normal(0.0, math.sqrt(2.0 / fan_in), size=shape)


class Conv2d(Module):
    def __init__(
        self,
        rng: np.random.Generator,
        in_channels: int,
        out_channels: int,
        kernel: int,
        stride: int = 1,
        pad: int = 0,
    ):
        fan_in = in_channels * kernel * kernel
        self.weight = Tensor(
            kaiming_normal(rng, (out_channels, in_channels, kernel, kernel), fan_in),
            requires_grad=True,
        )
        self.bias = Tensor(np.zeros(out_channels), requires_grad=True)
        self.stride = stride
        self.pad = pad

    @property
    def out_channels(self) -> int:
        return self.weight.shape[0]

    def __call__(self, x: Tensor) -> Tensor:
        return conv2d(x, self.weight, self.bias, self.stride, self.pad)


class Linear(Module):
    def __init__(self, rng: np.random.Generator, in_features: int, out_features: int):
        self.weight = Tensor(
            kaiming_normal(rng, (out_features, in_features), in_features),
            requires_grad=True,
        )
        self.bias = Tensor(np.zeros(out_features), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        return linear(x, self.weight, self.bias)


@dataclass(frozen=True)
class BlockPlan:
    kernel: int
    stride: int
    pad: int
    out_channels: int

    def output_size(self, size: int) -> int:
        return (size + 2 * self.pad - self.kernel) // self.stride + 1


def plan_trunk(input_size: int, grid_size: int, widths: list[int]) -> list[BlockPlan]:
    """
    Lays out conv blocks that take an input_size square to a grid_size square.
    Stride-2 3x3 blocks halve the side while the result stays at least
    grid_size, one unpadded block then lands exactly on grid_size and
    stride-1 3x3 blocks fill up to len(widths) blocks. Extra blocks reuse
    the last width.
    """
    if not widths or any(w < 1 for w in widths):
        raise InvalidArgumentError(f"Trunk widths must be positive, got {widths}.")
    if grid_size < 1 or input_size < grid_size:
        raise InvalidArgumentError(
            f"Can't reduce a {input_size} px input to a {grid_size} grid."
        )

    shapes = []
    size = input_size
    while math.ceil(size / 2) >= grid_size:
        shapes.append((3, 2, 1))
        size = math.ceil(size / 2)
    shapes.append((size - grid_size + 1, 1, 0))
    while len(shapes) < len(widths):
        shapes.append((3, 1, 1))

    return [
        BlockPlan(kernel, stride, pad, widths[min(i, len(widths) - 1)])
        for i, (kernel, stride, pad) in enumerate(shapes)
    ]


class ConvTrunk(Module):
    """Conv + ReLU blocks mapping 1 x C_in x R x R to 1 x C x grid x grid."""

    def __init__(
        self,
        rng: np.random.Generator,
        in_channels: int,
        input_size: int,
        grid_size: int,
        widths: list[int],
    ):
        self.plan = plan_trunk(input_size, grid_size, widths)
        self.input_size = input_size
        self.grid_size = grid_size
        self.blocks = []
        channels = in_channels
        for block in self.plan:
            self.blocks.append(
                Conv2d(
                    rng, channels, block.out_channels, block.kernel, block.stride, block.pad
                )
            )
            channels = block.out_channels

    @property
    def out_channels(self) -> int:
        return self.plan[-1].out_channels

    def __call__(self, x: Tensor) -> Tensor:
        if x.shape[-2:] != (self.input_size, self.input_size):
            raise InvalidArgumentError(
                f"Trunk expects {self.input_size}x{self.input_size} inputs, "
                f"got {x.shape[-2]}x{x.shape[-1]}."
            )
        for block in self.blocks:
            x = relu(block(x))
        return x

    def pooled(self, x: Tensor) -> tuple[Tensor, Tensor]:
        features = self(x)
        return features, global_avg_pool(features)


def standardize(image: np.ndarray) -> Tensor:
    """C x H x W image in [0, 1] -> 1 x C x H x W tensor with zero mean and unit variance."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3:
        raise InvalidArgumentError(f"Expected a C x H x W image, got shape {image.shape}.")
    std = max(float(image.std()), 1e-8)
    return Tensor(((image - image.mean()) / std)[None])
