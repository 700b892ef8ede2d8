"""
The validated, immutable view of the settings a run uses.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import tomlkit

from zoomlens import settings
from zoomlens.exceptions import ConfigError, InvalidArgumentError
from zoomlens.model import ModelConfig, plan_trunk
from zoomlens.utils import hash_flat_mapping

TABLE_OF = {
    key: table for table, keys in settings.DEFAULT_SETTINGS.items() for key in keys
}

# may be zero
NON_NEGATIVE = {
    "momentum",
    "val_fraction",
    "phase1_steps",
    "phase2_steps",
    "phase3_steps",
    "kappa_margin",
}
FRACTIONS = {
    "val_fraction",
    "specificity",
    "tau_ratio",
    "box_recall",
    "person_recall",
    "iom_thresholds",
    "iom_threshold",
}


@dataclass(frozen=True)
class RunConfig:
    # run
    seed: int = 7
    # data
    train_pairs: int = 5000
    test_pairs: int = 1000
    val_fraction: float = 0.1
    render_size: int = 320
    input_size: int = 128
    high_res_scale: float = 2.5
    border_threshold: float = 0.02
    augment: bool = True
    image_dir: str = ""
    labels_csv: str = ""
    # model
    grid_size: int = 14
    mnet_widths: tuple[int, ...] = (8, 16, 32, 32, 32)
    anet_hidden: int = 16
    cnet_grid_size: int = 7
    cnet_widths: tuple[int, ...] = (8, 16, 16, 16, 16)
    patch_size: int = 384
    patch_reference_size: int = 1230
    single_eye: bool = False
    # sampler
    region_size: int = 200
    reference_size: int = 492
    regions: int = 4
    tau_ratio: float = 0.05
    # optimizer
    learning_rate: float = 1e-5
    desk_lr_scale: float = 100.0
    momentum: float = 0.9
    step_size: int = 20000
    decay_factor: float = 0.1
    accumulation: int = 12
    # schedule
    phases: tuple[int, ...] = (1, 2, 3)
    phase1_steps: int = 400
    phase2_steps: int = 200
    phase3_steps: int = 400
    # eval
    iom_thresholds: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    specificity: float = 0.5
    # cluster
    top_k: int = 4
    damping: float = 0.5
    max_iter: int = 500
    stable_iters: int = 50
    max_images: int = 100
    montage_tiles: int = 16
    polish: bool = False
    # acceptance
    kappa_margin: float = 0.01
    iom_threshold: float = 0.3
    box_recall: float = 0.70
    person_recall: float = 0.80

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            default = field.default
            if isinstance(default, tuple):
                if not isinstance(value, tuple) or not value:
                    raise ConfigError(f"'{self.key_of(field.name)}' must be a non-empty list.")
                values = value
            else:
                values = (value,)

            for item in values:
                self._check_value(field.name, item, default)

        if any(phase not in (1, 2, 3) for phase in self.phases):
            raise ConfigError("'schedule.phases' may only hold 1, 2 and 3.")
        if list(self.phases) != sorted(set(self.phases)):
            raise ConfigError("'schedule.phases' must be increasing without repeats.")
        if not 0.5 <= self.damping < 1:
            raise ConfigError("'cluster.damping' must be in [0.5, 1).")
        if self.high_res_size < self.input_size:
            raise ConfigError("'data.high_res_scale' must be at least 1.")

        try:
            plan_trunk(self.input_size, self.grid_size, list(self.mnet_widths))
            plan_trunk(self.effective_patch_size, self.cnet_grid_size, list(self.cnet_widths))
            self.model_config()
        except InvalidArgumentError as exc:
            raise ConfigError(f"Architecture doesn't fit the image sizes: {exc}")

    def _check_value(self, name: str, value: Any, default: Any) -> None:
        key = self.key_of(name)
        expected = type(default[0]) if isinstance(default, tuple) else type(default)
        if expected is bool:
            if not isinstance(value, bool):
                raise ConfigError(f"'{key}' must be true or false, got {value!r}.")
            return
        if expected is str:
            if not isinstance(value, str):
                raise ConfigError(f"'{key}' must be a string, got {value!r}.")
            return
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"'{key}' must be a number, got {value!r}.")
        if expected is int and not isinstance(value, int):
            raise ConfigError(f"'{key}' must be an integer, got {value!r}.")

        if name in NON_NEGATIVE:
            if value < 0:
                raise ConfigError(f"'{key}' can't be negative, got {value}.")
        elif value <= 0:
            raise ConfigError(f"'{key}' must be positive, got {value}.")
        if name in FRACTIONS and value > 1:
            raise ConfigError(f"'{key}' must be at most 1, got {value}.")

    @staticmethod
    def key_of(name: str) -> str:
        return f"{TABLE_OF[name]}.{name}"

    @classmethod
    def from_settings(cls) -> RunConfig:
        flat = settings.flatten()
        kwargs = {}
        for field in dataclasses.fields(cls):
            value = flat[cls.key_of(field.name)]
            kwargs[field.name] = tuple(value) if isinstance(value, list) else value
        return cls(**kwargs)

    @classmethod
    def load(cls, path: Path | str | None, seed: int | None = None) -> RunConfig:
        """Reads a TOML config over the defaults. 'seed' overrides run.seed."""
        settings.load(path)
        config = cls.from_settings()
        return config.with_seed(seed) if seed is not None else config

    def with_seed(self, seed: int) -> RunConfig:
        return dataclasses.replace(self, seed=seed)

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)

    def flat(self) -> dict[str, Any]:
        return {
            self.key_of(field.name): getattr(self, field.name)
            for field in dataclasses.fields(self)
        }

    def config_hash(self) -> str:
        return hash_flat_mapping(self.flat())

    def to_toml(self) -> str:
        tables = {}
        for key, value in self.flat().items():
            table, name = key.split(".")
            tables.setdefault(table, {})[name] = (
                list(value) if isinstance(value, tuple) else value
            )
        return tomlkit.dumps(tables)

    @property
    def high_res_size(self) -> int:
        return round(self.input_size * self.high_res_scale)

    @property
    def effective_region_size(self) -> int:
        """Region side rescaled from its reference resolution to the input size."""
        return max(1, round(self.region_size * self.input_size / self.reference_size))

    @property
    def effective_patch_size(self) -> int:
        return max(
            1, round(self.patch_size * self.high_res_size / self.patch_reference_size)
        )

    @property
    def effective_learning_rate(self) -> float:
        return self.learning_rate * self.desk_lr_scale

    @property
    def test_fraction(self) -> float:
        return self.test_pairs / (self.train_pairs + self.test_pairs)

    def phase_steps(self, phase: int) -> int:
        return {1: self.phase1_steps, 2: self.phase2_steps, 3: self.phase3_steps}[phase]

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            input_size=self.input_size,
            grid_size=self.grid_size,
            mnet_widths=tuple(self.mnet_widths),
            anet_hidden=self.anet_hidden,
            cnet_grid_size=self.cnet_grid_size,
            cnet_widths=tuple(self.cnet_widths),
            high_res_size=self.high_res_size,
            patch_size=self.effective_patch_size,
            region_size=self.effective_region_size,
            regions=self.regions,
            tau_ratio=self.tau_ratio,
            single_eye=self.single_eye,
        )
