from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from zoomlens.constants import LEVEL_COUNT
from zoomlens.exceptions import InvalidArgumentError
from zoomlens.model.layers import Conv2d, Module
from zoomlens.tensor import (
    Tensor,
    elementwise_mul,
    relu,
    reshape,
    softmax,
    softmax_vector,
    sum_axes,
)


def spatial_softmax(logits: Tensor) -> Tensor:
    """Softmax over the H x W positions of each class slice of an (N x) L x H x W stack."""
    if logits.ndim < 3:
        raise InvalidArgumentError(
            f"spatial_softmax expects (N x) L x H x W, got {logits.shape}."
        )
    *lead, height, width = logits.shape
    flat = reshape(logits, (*lead, height * width))
    return reshape(softmax(flat, axis=-1), logits.shape)


def gate(scores: Tensor, attention: Tensor) -> Tensor:
    if scores.shape != attention.shape:
        raise InvalidArgumentError(
            f"gate needs equal shapes, got {scores.shape} and {attention.shape}."
        )
    return elementwise_mul(scores, attention)


def anet_logits(gated: Tensor) -> Tensor:
    """Global sum pooling of each class slice."""
    return sum_axes(gated, (-2, -1))


@dataclass
class ANetOutput:
    scores: Tensor
    attention: Tensor
    gated: Tensor
    logits: Tensor
    probs: Tensor


class ANet(Module):
    """
    A 1x1 conv on M scores each grid cell per class. Attention logits come
    from M through 3x3 (C -> hidden), 3x3 (hidden -> hidden) and 1x1
    (hidden -> L) convs.
    """

    def __init__(
        self,
        rng: np.random.Generator,
        channels: int,
        hidden: int = 16,
        levels: int = LEVEL_COUNT,
    ):
        self.scorer = Conv2d(rng, channels, levels, 1)
        self.attention = [
            Conv2d(rng, channels, hidden, 3, pad=1),
            Conv2d(rng, hidden, hidden, 3, pad=1),
            Conv2d(rng, hidden, levels, 1),
        ]

    def __call__(self, feature_map: Tensor) -> ANetOutput:
        scores = self.scorer(feature_map)

        x = feature_map
        for i, conv in enumerate(self.attention):
            x = conv(x)
            if i < len(self.attention) - 1:
                x = relu(x)
        attention = spatial_softmax(x)

        gated = gate(scores, attention)
        logits = anet_logits(gated)
        return ANetOutput(scores, attention, gated, logits, softmax_vector(logits))
