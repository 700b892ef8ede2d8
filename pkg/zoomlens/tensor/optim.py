from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Collection, Mapping

import numpy as np

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.tensor.tensor import Tensor

logger = logging.getLogger(__name__)


@dataclass
class SgdState:
    learning_rate: float
    momentum: float = 0.9
    step_size: int = 20000
    decay_factor: float = 0.1
    step_count: int = 0
    velocities: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise InvalidArgumentError("learning_rate must be positive.")
        if not 0 <= self.momentum < 1:
            raise InvalidArgumentError("momentum must be in [0, 1).")
        if self.step_size < 1:
            raise InvalidArgumentError("step_size must be a positive integer.")
        if not 0 < self.decay_factor <= 1:
            raise InvalidArgumentError("decay_factor must be in (0, 1].")

    @classmethod
    def for_parameters(cls, params: Mapping[str, Tensor], **kwargs) -> SgdState:
        state = cls(**kwargs)
        state.velocities = {
            name: np.zeros_like(param.data) for name, param in params.items()
        }
        return state


def zero_grad(params: Mapping[str, Tensor]) -> None:
    for param in params.values():
        param.zero_grad()


def sgd_step(
    state: SgdState,
    params: Mapping[str, Tensor],
    frozen: Collection[str] = (),
) -> None:
    """
    v <- momentum * v - lr * grad, p <- p + v for every parameter not in
    'frozen'. Frozen parameters and their velocities are left untouched.
    """
    for name, param in params.items():
        if name in frozen or param.grad is None:
            continue
        velocity = state.velocities.setdefault(name, np.zeros_like(param.data))
        if velocity.shape != param.data.shape:
            raise InvalidArgumentError(
                f"Velocity for '{name}' has shape {velocity.shape}, "
                f"parameter has {param.data.shape}."
            )
        velocity *= state.momentum
        velocity -= state.learning_rate * param.grad
        param.data += velocity

    state.step_count += 1
    if state.step_count % state.step_size == 0:
        state.learning_rate *= state.decay_factor
        logger.info(
            f"Learning rate decayed to {state.learning_rate:g} "
            f"after {state.step_count} steps."
        )
