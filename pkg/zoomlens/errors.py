from typing import NamedTuple

from zoomlens.requests import Post, post


class Error(NamedTuple):
    title: str
    message: str


CONFIG_INVALID = Error("Invalid config", "Config at '{}' is invalid: {}")
OUTPUT_DIR_EXISTS = Error(
    "Output directory exists",
    "Output directory '{}' is not empty. Use --force to overwrite it.",
)
DATASET_ROW_ERRORS = Error(
    "Dataset load warnings", "{} row(s) were skipped while loading '{}':\n{}"
)
STAGE_FAILED = Error("Stage failed", "Stage '{}' failed: {}")
ACCEPTANCE_UNMET = Error("Acceptance unmet", "{}")


def display(error: Error, *args):
    post(Post.DISPLAY_ERROR, error.title, error.message.format(*args))
