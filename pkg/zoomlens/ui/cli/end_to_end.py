from zoomlens.exceptions import AcceptanceError
from zoomlens.harness.pipeline import end_to_end
from zoomlens.requests import Post, listen, stop_listening_to_all
from zoomlens.ui.cli import io
from zoomlens.ui.cli.common import add_config_arguments, load_config, show_report


def setup_parser(subparsers):
    parser = subparsers.add_parser(
        "end-to-end",
        exit_on_error=False,
        help="Generate, train, evaluate, sample and cluster in one run.",
    )
    add_config_arguments(parser)

    parser.set_defaults(func=run_end_to_end)


class _StageEcho:
    def __init__(self):
        listen(self, Post.PIPELINE_STAGE_STARTED, self.on_stage_started)

    @staticmethod
    def on_stage_started(name: str):
        io.output(f"[{name}]")


def run_end_to_end(namespace):
    config = load_config(namespace)
    echo = _StageEcho()
    try:
        result = end_to_end(config, namespace.out, namespace.force)
    finally:
        stop_listening_to_all(echo)

    show_report(result.report, config.iom_threshold)
    if not result.accepted:
        raise AcceptanceError(result.failures)
    io.output("All acceptance thresholds met.")
