"""
The three-phase training schedule: M-Net alone, then A-Net with M-Net
held fixed, then everything together.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from zoomlens.constants import CHECKPOINT_EXTENSION
from zoomlens.exceptions import InvalidArgumentError, NonFiniteLossError, NonFiniteValueError
from zoomlens.fundus import FundusDataset, prepare_pair
from zoomlens.harness.config import RunConfig
from zoomlens.model import ZoomNet, ZoomNetOutput
from zoomlens.requests import Post, post
from zoomlens.tensor import SgdState, backward, reset_graph, sgd_step, zero_grad
from zoomlens.utils import child_rng, derive_seed

logger = logging.getLogger(__name__)

MODEL_STREAM = 1
BATCH_STREAM = 2
AUGMENT_STREAM = 3

FINAL_CHECKPOINT = f"model.{CHECKPOINT_EXTENSION}"

ForwardHook = Callable[[ZoomNetOutput], None]


def build_model(config: RunConfig) -> ZoomNet:
    return ZoomNet(config.model_config(), seed=derive_seed(config.seed, MODEL_STREAM))


def phase_checkpoint_name(phase: int) -> str:
    return f"phase{phase}.{CHECKPOINT_EXTENSION}"


@dataclass
class TrainResult:
    model: ZoomNet
    losses: dict[int, list[float]] = field(default_factory=dict)
    checkpoints: dict[int, Path] = field(default_factory=dict)
    final_checkpoint: Path | None = None


class Trainer:
    """
    One step is one optimizer update over 'accumulation' mini-batches of one
    eye pair each. Losses are summed, so accumulated gradients equal those
    of the concatenated batch.
    """

    def __init__(
        self,
        config: RunConfig,
        dataset: FundusDataset,
        out_dir: Path,
        model: ZoomNet | None = None,
    ):
        if not len(dataset):
            raise InvalidArgumentError("Can't train on an empty dataset.")
        self.config = config
        self.dataset = dataset
        self.out_dir = out_dir
        self.model = model or build_model(config)
        self.forward_hooks: list[ForwardHook] = []

    def minibatch_loss(self, phase: int, step: int, index: int, pair) -> float:
        config = self.config
        augment_rng = (
            child_rng(config.seed, AUGMENT_STREAM, phase, step, index)
            if config.augment
            else None
        )
        prepared = prepare_pair(
            pair,
            config.input_size,
            config.high_res_size,
            config.border_threshold,
            augment_rng,
        )
        try:
            output = self.model(prepared.low, prepared.high, phase)
            for hook in self.forward_hooks:
                hook(output)
            loss = output.loss(prepared.low, phase)
            value = loss.item()
            backward(loss)
        except NonFiniteValueError:
            reset_graph()
            raise NonFiniteLossError(phase, step, math.nan)
        return value

    def step(self, state: SgdState, phase: int, step: int) -> float:
        params = self.model.named_parameters()
        zero_grad(params)

        rng = child_rng(self.config.seed, BATCH_STREAM, phase, step)
        indices = rng.integers(len(self.dataset), size=self.config.accumulation)

        total = 0.0
        for k, index in enumerate(indices):
            total += self.minibatch_loss(phase, step, k, self.dataset.pairs[int(index)])

        if not math.isfinite(total):
            raise NonFiniteLossError(phase, step, total)

        sgd_step(state, params, frozen=self.model.frozen_parameters(phase))
        return total

    def run_phase(self, phase: int, steps: int) -> list[float]:
        config = self.config
        state = SgdState.for_parameters(
            self.model.named_parameters(),
            learning_rate=config.effective_learning_rate,
            momentum=config.momentum,
            step_size=config.step_size,
            decay_factor=config.decay_factor,
        )
        losses = []
        for step in range(steps):
            loss = self.step(state, phase, step)
            losses.append(loss)
            logger.info(f"phase {phase} update {step + 1}/{steps} loss {loss:.6f}")
            post(Post.TRAIN_UPDATE_DONE, phase, step, loss)
        return losses

    def train(self) -> TrainResult:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        result = TrainResult(self.model)
        for phase in self.config.phases:
            steps = self.config.phase_steps(phase)
            logger.info(f"Starting phase {phase} ({steps} updates).")
            result.losses[phase] = self.run_phase(phase, steps)

            self.model.trained_phase = phase
            path = self.out_dir / phase_checkpoint_name(phase)
            self.model.save(path)
            result.checkpoints[phase] = path
            post(Post.TRAIN_PHASE_DONE, phase, path)

        result.final_checkpoint = self.out_dir / FINAL_CHECKPOINT
        self.model.save(result.final_checkpoint)
        return result


def train(
    config: RunConfig, dataset: FundusDataset, out_dir: Path
) -> TrainResult:
    return Trainer(config, dataset, out_dir).train()
