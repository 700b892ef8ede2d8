from __future__ import annotations

import copy
from pathlib import Path
from typing import Any

import tomlkit
import tomlkit.exceptions

from zoomlens.exceptions import ConfigError

# Sizes that depend on the image resolution carry the reference resolution
# they are given at and are rescaled by RunConfig.
DEFAULT_SETTINGS = {
    "run": {"seed": 7},
    "data": {
        "train_pairs": 5000,
        "test_pairs": 1000,
        "val_fraction": 0.1,
        "render_size": 320,
        "input_size": 128,
        "high_res_scale": 2.5,
        "border_threshold": 0.02,
        "augment": True,
        "image_dir": "",
        "labels_csv": "",
    },
    "model": {
        "grid_size": 14,
        "mnet_widths": [8, 16, 32, 32, 32],
        "anet_hidden": 16,
        "cnet_grid_size": 7,
        "cnet_widths": [8, 16, 16, 16, 16],
        "patch_size": 384,
        "patch_reference_size": 1230,
        "single_eye": False,
    },
    "sampler": {
        "region_size": 200,
        "reference_size": 492,
        "regions": 4,
        "tau_ratio": 0.05,
    },
    "optimizer": {
        "learning_rate": 1e-5,
        "desk_lr_scale": 100.0,
        "momentum": 0.9,
        "step_size": 20000,
        "decay_factor": 0.1,
        "accumulation": 12,
    },
    "schedule": {
        "phases": [1, 2, 3],
        "phase1_steps": 400,
        "phase2_steps": 200,
        "phase3_steps": 400,
    },
    "eval": {
        "iom_thresholds": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
        "specificity": 0.5,
    },
    "cluster": {
        "top_k": 4,
        "damping": 0.5,
        "max_iter": 500,
        "stable_iters": 50,
        "max_images": 100,
        "montage_tiles": 16,
        "polish": False,
    },
    "acceptance": {
        "kappa_margin": 0.01,
        "iom_threshold": 0.3,
        "box_recall": 0.70,
        "person_recall": 0.80,
    },
}

_settings: dict = copy.deepcopy(DEFAULT_SETTINGS)
_settings_path = Path()


def load(settings_path: Path | str | None):
    """
    Loads a TOML config on top of the defaults.
    Passing None resets to the defaults.
    """
    global _settings, _settings_path
    _settings = copy.deepcopy(DEFAULT_SETTINGS)
    _settings_path = Path(settings_path) if settings_path else Path()

    if not settings_path:
        return

    try:
        with open(settings_path, "r") as f:
            loaded_settings = tomlkit.load(f).unwrap()
    except FileNotFoundError:
        raise ConfigError(f"No config file at '{settings_path}'.")
    except tomlkit.exceptions.ParseError as exc:
        raise ConfigError(f"Could not parse '{settings_path}': {exc}")

    for table_name, table in loaded_settings.items():
        if table_name not in DEFAULT_SETTINGS or not isinstance(table, dict):
            raise ConfigError(f"Unknown config table '{table_name}'.")
        for setting, value in table.items():
            if setting not in DEFAULT_SETTINGS[table_name]:
                raise ConfigError(f"Unknown config key '{table_name}.{setting}'.")
            _settings[table_name][setting] = value


def get(table_name: str, setting: str) -> Any:
    try:
        table = _settings[table_name]
    except KeyError:
        _set_default_table(table_name)
        return get(table_name, setting)

    try:
        return table[setting]
    except KeyError:
        _set_default_setting(table_name, setting)
        return get(table_name, setting)


def edit(table: str, name: str, value) -> None:
    if table not in DEFAULT_SETTINGS or name not in DEFAULT_SETTINGS[table]:
        raise ConfigError(f"Unknown config key '{table}.{name}'.")
    _settings[table][name] = value


def flatten() -> dict[str, Any]:
    """Returns the settings as a flat 'table.key' namespace, sorted by key."""
    flat = {}
    for table_name in sorted(_settings):
        for setting in sorted(_settings[table_name]):
            flat[f"{table_name}.{setting}"] = _settings[table_name][setting]
    return flat


def dumps() -> str:
    return tomlkit.dumps(_settings)


def save(path: Path) -> None:
    with open(path, "w") as f:
        f.write(dumps())


def _set_default_setting(table, name):
    _settings[table][name] = copy.deepcopy(DEFAULT_SETTINGS[table][name])


def _set_default_table(table):
    _settings[table] = copy.deepcopy(DEFAULT_SETTINGS[table])
