from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from zoomlens.constants import LEVEL_COUNT
from zoomlens.exceptions import InvalidArgumentError
from zoomlens.model.batch import EyePairBatch
from zoomlens.model.layers import ConvTrunk, Linear, Module, standardize
from zoomlens.tensor import Tensor, concat, softmax_vector


@dataclass
class MNetOutput:
    y_left: Tensor
    y_right: Tensor | None
    m_left: Tensor
    m_right: Tensor | None
    d_left: Tensor
    d_right: Tensor | None


class MNet(Module):
    """
    Conv trunk to a grid x grid feature map M, its global average d_M, and a
    head reading [own d_M, sibling d_M].
    """

    def __init__(
        self,
        rng: np.random.Generator,
        input_size: int,
        grid_size: int,
        widths: list[int],
        levels: int = LEVEL_COUNT,
    ):
        self.trunk = ConvTrunk(rng, 3, input_size, grid_size, widths)
        self.head = Linear(rng, 2 * self.trunk.out_channels, levels)

    @property
    def channels(self) -> int:
        return self.trunk.out_channels

    @property
    def input_size(self) -> int:
        return self.trunk.input_size

    def encode(self, image: np.ndarray) -> tuple[Tensor, Tensor]:
        return self.trunk.pooled(standardize(image))

    def classify(self, d_own: Tensor, d_sibling: Tensor) -> Tensor:
        return softmax_vector(self.head(concat([d_own, d_sibling], axis=1)))

    def __call__(self, pair: EyePairBatch, single_eye: bool = False) -> MNetOutput:
        return mnet_forward(self, pair, single_eye)


def _check_size(mnet: MNet, image: np.ndarray, eye: str) -> None:
    size = mnet.input_size
    if image.ndim != 3 or image.shape[1:] != (size, size):
        raise InvalidArgumentError(
            f"{eye} image has shape {image.shape}, expected 3x{size}x{size}."
        )


def mnet_forward(mnet: MNet, pair: EyePairBatch, single_eye: bool = False) -> MNetOutput:
    """
    Each eye goes through the trunk on its own, so swapping the eyes swaps
    the outputs bit for bit. In single-eye mode, or with no sibling, the
    sibling half of the head input is zero.
    """
    _check_size(mnet, pair.left, "Left")
    m_left, d_left = mnet.encode(pair.left)
    if pair.right is None:
        zeros = Tensor(np.zeros_like(d_left.data))
        return MNetOutput(mnet.classify(d_left, zeros), None, m_left, None, d_left, None)

    _check_size(mnet, pair.right, "Right")
    m_right, d_right = mnet.encode(pair.right)

    if single_eye:
        zeros = Tensor(np.zeros_like(d_left.data))
        y_left = mnet.classify(d_left, zeros)
        y_right = mnet.classify(d_right, zeros)
    else:
        y_left = mnet.classify(d_left, d_right)
        y_right = mnet.classify(d_right, d_left)

    return MNetOutput(y_left, y_right, m_left, m_right, d_left, d_right)
