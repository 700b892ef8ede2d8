from zoomlens.harness.data import generate_data
from zoomlens.ui.cli import io
from zoomlens.ui.cli.common import (
    add_config_arguments,
    add_data_arguments,
    data_dir,
    ensure_writable,
    load_config,
)


def setup_parser(subparsers):
    parser = subparsers.add_parser(
        "gen-data", exit_on_error=False, help="Render the synthetic fundus dataset."
    )
    add_config_arguments(parser)
    add_data_arguments(parser, split=None)

    parser.set_defaults(func=gen_data)


def gen_data(namespace):
    config = load_config(namespace)
    path = data_dir(namespace)
    ensure_writable(path, namespace.force)

    dataset = generate_data(config, path)
    io.output(f"Wrote {len(dataset.pairs)} pairs ({len(dataset.samples)} images) to '{path}'.")
