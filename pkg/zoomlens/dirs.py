"""
Where zoomlens keeps its settings file and log. Both live in one data
directory, created on first use.
"""

from __future__ import annotations

import os
from pathlib import Path

import appdirs
import tomlkit

import zoomlens
from zoomlens import settings
from zoomlens.constants import APP_NAME, DATA_DIR_ENV_VAR, LOG_FILE_NAME, SETTINGS_FILE_NAME

settings_path = Path()
log_path = Path()
data_path = Path()


def get_parent_path() -> Path:
    return Path(zoomlens.__file__).absolute().parents[1]


def default_data_dir() -> Path:
    """ZOOMLENS_DATA_DIR when set, else the per-user data directory."""
    if override := os.environ.get(DATA_DIR_ENV_VAR):
        return Path(override)
    return Path(appdirs.user_data_dir(APP_NAME, appauthor=False, roaming=True))


def fallback_data_dir() -> Path:
    return Path.cwd() / f".{APP_NAME}"


def create_data_dir(path: Path) -> Path:
    """Creates 'path', or the fallback directory if 'path' can't be written."""
    try:
        path.mkdir(parents=True, exist_ok=True)
        return path
    except PermissionError:
        fallback = fallback_data_dir()
        fallback.mkdir(parents=True, exist_ok=True)
        return fallback


def create_settings_file(data_dir: Path) -> None:
    Path(data_dir, SETTINGS_FILE_NAME).write_text(
        tomlkit.dumps(settings.DEFAULT_SETTINGS), encoding="utf-8"
    )


def setup_dirs(data_dir: Path | None = None) -> None:
    """Points settings_path and log_path into the data directory."""
    global settings_path, log_path, data_path
    data_path = create_data_dir(data_dir or default_data_dir())

    settings_path = data_path / SETTINGS_FILE_NAME
    if not settings_path.exists():
        create_settings_file(data_path)

    log_path = data_path / LOG_FILE_NAME
