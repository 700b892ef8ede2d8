from __future__ import annotations

import json
import subprocess
from dataclasses import asdict, dataclass, field
from pathlib import Path

from zoomlens import dirs
from zoomlens.constants import VERSION
from zoomlens.exceptions import InvalidArgumentError, NotFoundError


def describe_version() -> str:
    """'git describe' of the source tree when available, else the package version."""
    try:
        result = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=dirs.get_parent_path(),
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return f"v{VERSION}"
    described = result.stdout.strip()
    return described if result.returncode == 0 and described else f"v{VERSION}"


@dataclass
class RunManifest:
    config_hash: str
    seed: int
    version: str = field(default_factory=describe_version)
    losses: dict[str, list[float]] = field(default_factory=dict)
    metrics: dict | None = None
    stages: list[str] = field(default_factory=list)

    def record_losses(self, phase: int, losses: list[float]) -> None:
        self.losses[f"phase{phase}"] = list(losses)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def save(self, path: Path) -> None:
        path.write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> RunManifest:
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise NotFoundError(f"No manifest at '{path}'.")
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"Manifest at '{path}' is not valid JSON: {exc}")
        return cls(**data)
