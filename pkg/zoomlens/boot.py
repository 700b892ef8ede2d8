from __future__ import annotations

import logging
import sys
import traceback

import dotenv

from zoomlens import dirs
from zoomlens.constants import TRACE
from zoomlens.ui.cli.ui import CLI

logger = logging.getLogger(__name__)

LOG_FORMAT = " %(name)-50s %(lineno)-5s %(levelname)-8s %(message)s"


def handle_exception(type, value, tb):
    exc_message = "".join(traceback.format_exception(type, value, tb))
    logger.critical(exc_message)
    print(exc_message, file=sys.stderr)


def boot(argv: list[str] | None = None) -> int:
    """Parses 'argv', prepares the data directory and log, then runs the command."""
    sys.excepthook = handle_exception
    dotenv.load_dotenv()
    cli = CLI()
    namespace = cli.parse(sys.argv[1:] if argv is None else argv)
    if isinstance(namespace, int):
        # --help or a parse error; nothing was run
        return namespace

    setup_dirs()
    setup_logging(namespace.logging)  # needs dirs.log_path
    logger.info(f"Running '{namespace.command}'.")
    return cli.run(namespace)


def setup_dirs():
    dirs.setup_dirs()


def setup_logging(level: str):
    logging.addLevelName(TRACE, "TRACE")
    try:
        logging.basicConfig(
            filename=dirs.log_path, filemode="w", level=level, format=LOG_FORMAT
        )
    except PermissionError:
        # read-only data dir: log to stderr instead
        logging.basicConfig(level=level, format=LOG_FORMAT)
