"""
Composition of M-Net, A-Net and C-Net. Regions for C-Net are sampled from
the gated maps of A-Net; the sampling itself is not differentiated.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from zoomlens.constants import LEVEL_COUNT
from zoomlens.exceptions import InvalidArgumentError
from zoomlens.model.anet import ANet, ANetOutput
from zoomlens.model.batch import EyePairBatch
from zoomlens.model.cnet import CNet
from zoomlens.model.layers import Module, standardize
from zoomlens.model.loss import training_loss
from zoomlens.model.mnet import MNet, mnet_forward
from zoomlens.sampler import (
    ZoomRegions,
    crop_patches,
    greedy_sample,
    stop_threshold,
    upsample_attention,
)
from zoomlens.tensor import Tensor, add, checkpoint

logger = logging.getLogger(__name__)

TRAINED_PHASE_KEY = "meta.trained_phase"


@dataclass(frozen=True)
class ModelConfig:
    input_size: int = 128
    grid_size: int = 14
    mnet_widths: tuple[int, ...] = (8, 16, 32, 32, 32)
    anet_hidden: int = 16
    cnet_grid_size: int = 7
    cnet_widths: tuple[int, ...] = (8, 16, 16, 16, 16)
    high_res_size: int = 320
    patch_size: int = 100
    region_size: int = 52
    regions: int = 4
    tau_ratio: float = 0.05
    single_eye: bool = False
    levels: int = LEVEL_COUNT

    def __post_init__(self):
        if self.high_res_size < self.input_size:
            raise InvalidArgumentError("High-res size must be at least the input size.")
        if self.patch_size > self.high_res_size:
            raise InvalidArgumentError("Patch size can't exceed the high-res size.")

    @property
    def scale(self) -> float:
        return self.high_res_size / self.input_size


@dataclass
class EyeOutput:
    y_m: Tensor
    anet: ANetOutput | None = None
    regions: ZoomRegions | None = None
    y_c: Tensor | None = None
    patches: list[np.ndarray] = field(default_factory=list)

    @property
    def y_a(self) -> Tensor | None:
        return None if self.anet is None else self.anet.probs

    @property
    def gated(self) -> Tensor | None:
        return None if self.anet is None else self.anet.gated

    @property
    def y_ma(self) -> np.ndarray:
        """M-Net and A-Net heads averaged."""
        return (self.y_m.data.reshape(-1) + self.y_a.data.reshape(-1)) / 2

    def loss(self, grade: int, phase: int) -> Tensor:
        return training_loss(self.y_m, self.y_a, self.y_c, grade, phase)


@dataclass
class ZoomNetOutput:
    left: EyeOutput
    right: EyeOutput | None

    def eyes(self) -> list[EyeOutput]:
        return [self.left] if self.right is None else [self.left, self.right]

    def loss(self, pair: EyePairBatch, phase: int) -> Tensor:
        terms = [self.left.loss(pair.left_grade, phase)]
        if self.right is not None:
            terms.append(self.right.loss(pair.right_grade, phase))
        return add(*terms) if len(terms) > 1 else terms[0]


def predicted_grade(probs) -> int:
    """argmax; equal probabilities resolve to the lower grade."""
    return int(np.argmax(np.asarray(getattr(probs, "data", probs)).reshape(-1)))


class ZoomNet(Module):
    def __init__(self, config: ModelConfig, seed: int = 0):
        rng = np.random.default_rng(seed)
        self.mnet = MNet(
            rng, config.input_size, config.grid_size, list(config.mnet_widths), config.levels
        )
        self.anet = ANet(rng, self.mnet.channels, config.anet_hidden, config.levels)
        self.cnet = CNet(
            rng,
            config.patch_size,
            config.cnet_grid_size,
            list(config.cnet_widths),
            self.mnet.channels,
            config.levels,
        )
        self.config = config
        self.trained_phase = 0

    def frozen_parameters(self, phase: int) -> set[str]:
        """Names held fixed by the optimizer in 'phase'."""
        if phase == 2:
            return {
                name
                for name in self.named_parameters()
                if name.startswith(("mnet.", "cnet."))
            }
        return set()

    def sample_regions(self, gated: Tensor) -> ZoomRegions:
        size = self.config.input_size
        attention_map = upsample_attention(gated, size, size)
        return greedy_sample(
            attention_map,
            self.config.region_size,
            self.config.regions,
            stop_threshold(attention_map, self.config.tau_ratio),
        )

    def _eye_forward(
        self,
        m: Tensor,
        d_m: Tensor,
        y_m: Tensor,
        high_res: np.ndarray | None,
        phase: int,
        regions: ZoomRegions | None,
    ) -> EyeOutput:
        if phase == 1:
            # only y_M is trained
            return EyeOutput(y_m)

        anet_out = self.anet(m)
        if regions is None:
            regions = self.sample_regions(anet_out.gated)
        output = EyeOutput(y_m, anet_out, regions)

        if phase >= 3:
            if high_res is None:
                raise InvalidArgumentError("C-Net needs the high-resolution image.")
            output.patches = crop_patches(
                high_res,
                regions,
                self.config.scale,
                self.config.patch_size,
                self.config.regions,
            )
            output.y_c = self.cnet(
                [standardize(patch) for patch in output.patches], d_m
            ).y
        return output

    def __call__(
        self,
        pair: EyePairBatch,
        high_res_pair: EyePairBatch | None = None,
        phase: int = 3,
        regions: tuple[ZoomRegions, ZoomRegions | None] | None = None,
    ) -> ZoomNetOutput:
        return zoomnet_forward(self, pair, high_res_pair, phase, regions)

    def predict(self, output: EyeOutput) -> int:
        if self.trained_phase >= 3 and output.y_c is not None:
            return predicted_grade(output.y_c)
        return predicted_grade(output.y_m)

    def save(self, path: Path | str) -> None:
        state = self.state_dict()
        state[TRAINED_PHASE_KEY] = np.array([float(self.trained_phase)])
        checkpoint.save(path, state)

    def load(self, path: Path | str) -> None:
        state = checkpoint.load(path)
        phase = state.pop(TRAINED_PHASE_KEY, np.zeros(1))
        self.load_state_dict(state)
        self.trained_phase = int(phase.reshape(-1)[0])
        logger.info(f"Loaded checkpoint '{path}' (trained through phase {self.trained_phase}).")


def zoomnet_forward(
    model: ZoomNet,
    pair: EyePairBatch,
    high_res_pair: EyePairBatch | None = None,
    phase: int = 3,
    regions: tuple[ZoomRegions, ZoomRegions | None] | None = None,
) -> ZoomNetOutput:
    """
    Runs the heads needed for 'phase'. Phase 1 runs M-Net alone. A-Net and
    the sampler run from phase 2 on. C-Net only runs in phase 3, on patches
    cropped from 'high_res_pair' around regions sampled from G, or around
    'regions' when given.
    """
    if high_res_pair is not None and (
        high_res_pair.has_sibling != pair.has_sibling
    ):
        raise InvalidArgumentError("Low- and high-resolution pairs disagree on eyes.")

    mnet_out = mnet_forward(model.mnet, pair, model.config.single_eye)
    left_regions, right_regions = regions if regions is not None else (None, None)

    left = model._eye_forward(
        mnet_out.m_left,
        mnet_out.d_left,
        mnet_out.y_left,
        high_res_pair.left if high_res_pair is not None else None,
        phase,
        left_regions,
    )
    right = None
    if pair.has_sibling:
        right = model._eye_forward(
            mnet_out.m_right,
            mnet_out.d_right,
            mnet_out.y_right,
            high_res_pair.right if high_res_pair is not None else None,
            phase,
            right_regions,
        )
    return ZoomNetOutput(left, right)
