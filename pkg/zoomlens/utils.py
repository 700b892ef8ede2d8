import hashlib
import os
from typing import Any

import numpy as np

from zoomlens.constants import THREADS_ENV_VAR


def hash_function(string: str) -> str:
    return hashlib.md5(string.encode("utf-8")).hexdigest()


def hash_flat_mapping(mapping: dict[str, Any]) -> str:
    str_to_hash = "|"
    for key in sorted(mapping):
        str_to_hash += f"{key}={mapping[key]!r}|"

    return hash_function(str_to_hash)


def child_rng(seed: int, *keys: int) -> np.random.Generator:
    """
    Returns a generator that depends only on 'seed' and 'keys',
    so samples can be produced in any order or on any thread.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


def get_worker_count() -> int:
    cpu_count = os.cpu_count() or 1
    value = os.environ.get(THREADS_ENV_VAR, "")
    try:
        requested = int(value)
    except ValueError:
        return cpu_count

    return max(1, min(requested, cpu_count))


def derive_seed(seed: int, *keys: int) -> int:
    """A 32-bit seed that depends only on 'seed' and 'keys'."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])
