"""
Process-wide notifications. Stages and workers post, the CLI listens.
"""

from __future__ import annotations

import logging
import os
import weakref
from enum import Enum, auto
from typing import Any, Callable

from zoomlens.constants import TRACE

logger = logging.getLogger(__name__)

LOG_POSTS_ENV_VAR = "ZOOMLENS_LOG_POSTS"


class Post(Enum):
    DATASET_ROW_ERROR = auto()  # message
    DISPLAY_ERROR = auto()  # title, message
    PIPELINE_STAGE_DONE = auto()  # stage name
    PIPELINE_STAGE_STARTED = auto()  # stage name
    TRAIN_PHASE_DONE = auto()  # phase, checkpoint path
    TRAIN_UPDATE_DONE = auto()  # phase, step, loss


# listener -> {post: callback}; a listener's entry goes away with it
_subscriptions: weakref.WeakKeyDictionary[Any, dict[Post, Callable]] = (
    weakref.WeakKeyDictionary()
)


def _is_logged(post: Post) -> bool:
    """ZOOMLENS_LOG_POSTS holds '*' or ';'-separated post names."""
    names = os.environ.get(LOG_POSTS_ENV_VAR, "")
    return names == "*" or post.name in names.split(";")


def post(post: Post, *args, **kwargs) -> None:
    callbacks = [
        subscriptions[post]
        for subscriptions in list(_subscriptions.values())
        if post in subscriptions
    ]
    if _is_logged(post):
        logger.log(TRACE, f"{post.name:<24} {args!r} {kwargs!r} ({len(callbacks)} listeners)")
    for callback in callbacks:
        callback(*args, **kwargs)


def listen(listener: Any, post: Post, callback: Callable) -> None:
    _subscriptions.setdefault(listener, {})[post] = callback


def stop_listening(listener: Any, post: Post) -> None:
    subscriptions = _subscriptions.get(listener)
    if subscriptions is None:
        return
    subscriptions.pop(post, None)
    if not subscriptions:
        del _subscriptions[listener]


def stop_listening_to_all(listener: Any) -> None:
    _subscriptions.pop(listener, None)
