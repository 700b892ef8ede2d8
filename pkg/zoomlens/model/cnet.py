from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from zoomlens.constants import LEVEL_COUNT
from zoomlens.exceptions import InvalidArgumentError
from zoomlens.model.layers import ConvTrunk, Linear, Module
from zoomlens.tensor import Tensor, concat, max_elementwise, softmax_vector


@dataclass
class CNetOutput:
    y: Tensor
    fused: Tensor
    descriptors: list[Tensor]


class CNet(Module):
    def __init__(
        self,
        rng: np.random.Generator,
        patch_size: int,
        grid_size: int,
        widths: list[int],
        mnet_channels: int,
        levels: int = LEVEL_COUNT,
    ):
        self.trunk = ConvTrunk(rng, 3, patch_size, grid_size, widths)
        self.head = Linear(rng, self.trunk.out_channels + mnet_channels, levels)

    @property
    def patch_size(self) -> int:
        return self.trunk.input_size

    def describe(self, patch: Tensor) -> Tensor:
        return self.trunk.pooled(patch)[1]

    def __call__(self, patches: Sequence[Tensor], d_m: Tensor) -> CNetOutput:
        return cnet_forward(self, patches, d_m)


def cnet_forward(cnet: CNet, patches: Sequence[Tensor], d_m: Tensor) -> CNetOutput:
    """
    Element-wise max over the per-patch descriptors, joined with d_M and
    classified. The max makes the result independent of patch order.
    """
    if not patches:
        raise InvalidArgumentError("cnet_forward needs at least one patch.")

    descriptors = [cnet.describe(patch) for patch in patches]
    fused = max_elementwise(descriptors)
    y = softmax_vector(cnet.head(concat([fused, d_m], axis=1)))
    return CNetOutput(y, fused, descriptors)
