from __future__ import annotations

import argparse
import logging
import traceback

from zoomlens import errors
from zoomlens.exceptions import (
    AcceptanceError,
    CheckpointMismatchError,
    ConfigError,
    OutputExistsError,
    ZoomlensException,
)
from zoomlens.requests import Post, listen
from zoomlens.ui.cli import (
    cluster,
    end_to_end,
    evaluate,
    gen_data,
    io,
    metrics,
    sample,
    train,
)

logger = logging.getLogger(__name__)


class ExitCode:
    OK = 0
    CONFIG = 2
    RUNTIME = 3
    ACCEPTANCE = 4


class CLI:
    def __init__(self):
        self.parser = argparse.ArgumentParser(prog="zoomlens", exit_on_error=False)
        self.parser.add_argument(
            "--logging",
            "-l",
            choices=["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG", "TRACE"],
            default="INFO",
        )
        self.subparsers = self.parser.add_subparsers(dest="command", required=True)
        self.setup_parsers()
        self.exception = None

        listen(self, Post.DISPLAY_ERROR, self.on_request_to_display_error)
        listen(self, Post.DATASET_ROW_ERROR, self.on_dataset_row_error)

    def setup_parsers(self):
        gen_data.setup_parser(self.subparsers)
        train.setup_parser(self.subparsers)
        evaluate.setup_parser(self.subparsers)
        sample.setup_parser(self.subparsers)
        cluster.setup_parser(self.subparsers)
        metrics.setup_parser(self.subparsers)
        end_to_end.setup_parser(self.subparsers)

    def parse(self, argv: list[str]) -> argparse.Namespace | int:
        """Returns the parsed namespace, or an exit code if parsing failed."""
        try:
            return self.parser.parse_args(argv)
        except argparse.ArgumentError as err:
            io.output(str(err))
            self.exception = err
            return ExitCode.CONFIG
        except SystemExit as err:
            # --help exits with 0, usage errors with 2
            self.exception = err
            return ExitCode.OK if not err.code else ExitCode.CONFIG

    def run(self, argv: list[str] | argparse.Namespace) -> int:
        """
        Parses and runs a command, returning its exit code.
        The exception, if any, is stored in self.exception.
        """
        namespace = argv if isinstance(argv, argparse.Namespace) else self.parse(argv)
        if isinstance(namespace, int):
            return namespace

        try:
            namespace.func(namespace)
            return ExitCode.OK
        except (ConfigError, CheckpointMismatchError) as err:
            self.exception = err
            errors.display(errors.CONFIG_INVALID, namespace.config or "defaults", err)
            return ExitCode.CONFIG
        except AcceptanceError as err:
            self.exception = err
            errors.display(errors.ACCEPTANCE_UNMET, "\n".join(err.failures))
            return ExitCode.ACCEPTANCE
        except OutputExistsError as err:
            self.exception = err
            errors.display(errors.OUTPUT_DIR_EXISTS, getattr(namespace, "out", ""))
            return ExitCode.RUNTIME
        except ZoomlensException as err:
            self.exception = err
            logger.error(str(err))
            errors.display(errors.STAGE_FAILED, namespace.command, err)
            return ExitCode.RUNTIME
        except Exception as err:
            self.exception = err
            logger.exception(f"Unexpected error in '{namespace.command}'.")
            traceback.print_exc()
            return ExitCode.RUNTIME

    @staticmethod
    def on_request_to_display_error(_, message: str) -> None:
        """Ignores title and prints error message to output"""
        io.output(message)

    @staticmethod
    def on_dataset_row_error(message: str) -> None:
        io.output(message)
