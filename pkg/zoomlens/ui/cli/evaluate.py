from zoomlens.exceptions import OutputExistsError
from zoomlens.harness.data import load_data
from zoomlens.harness.evaluate import METRICS_FILE, evaluate
from zoomlens.harness.pipeline import EVAL_DIR
from zoomlens.ui.cli import io
from zoomlens.ui.cli.common import (
    add_checkpoint_argument,
    add_config_arguments,
    add_data_arguments,
    checkpoints,
    data_dir,
    load_config,
    show_report,
    split_of,
)


def setup_parser(subparsers):
    parser = subparsers.add_parser(
        "eval",
        exit_on_error=False,
        help="Score one checkpoint, or the average of several.",
    )
    add_config_arguments(parser)
    add_data_arguments(parser, split="test")
    add_checkpoint_argument(parser, ensemble=True)

    parser.set_defaults(func=evaluate_checkpoints)


def evaluate_checkpoints(namespace):
    config = load_config(namespace)
    paths = checkpoints(namespace)
    out_dir = namespace.out / EVAL_DIR
    if (out_dir / METRICS_FILE).exists() and not namespace.force:
        raise OutputExistsError(f"Output directory '{out_dir}' is not empty.")

    dataset = load_data(config, data_dir(namespace), split_of(namespace))
    io.output(f"Evaluating {len(dataset.pairs)} pairs with {len(paths)} checkpoint(s).")
    report = evaluate(config, paths, dataset, out_dir)

    show_report(report, config.iom_threshold)
    io.output(f"Wrote metrics to '{out_dir}'.")
