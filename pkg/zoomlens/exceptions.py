from __future__ import annotations


class ZoomlensException(Exception):
    pass


class InvalidArgumentError(ZoomlensException, ValueError):
    pass


class InvalidStateError(ZoomlensException, RuntimeError):
    pass


class NotFoundError(ZoomlensException, FileNotFoundError):
    pass


class NonFiniteValueError(ZoomlensException, FloatingPointError):
    """Raised when a forward or backward buffer holds NaN or Inf."""

    pass


class ConfigError(ZoomlensException):
    pass


class CheckpointMismatchError(InvalidArgumentError):
    def __init__(self, names: list[str]):
        self.names = sorted(names)
        super().__init__(
            "Checkpoint is incompatible with config. Mismatched tensors: "
            + ", ".join(self.names)
        )


class NonFiniteLossError(InvalidStateError):
    def __init__(self, phase: int, step: int, loss: float):
        self.phase = phase
        self.step = step
        self.loss = loss
        super().__init__(f"Non-finite loss ({loss}) at phase {phase}, step {step}.")


class OutputExistsError(ZoomlensException):
    pass


class AcceptanceError(ZoomlensException):
    """Raised when an end-to-end run misses one of its acceptance thresholds."""

    def __init__(self, failures: list[str]):
        self.failures = failures
        super().__init__("Acceptance thresholds unmet: " + "; ".join(failures))
