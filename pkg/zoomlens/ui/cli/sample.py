from zoomlens.exceptions import OutputExistsError
from zoomlens.harness.data import load_data
from zoomlens.harness.evaluate import load_models, predict_dataset
from zoomlens.harness.pipeline import EVAL_DIR
from zoomlens.harness.sample import REGIONS_FILE, write_overlays, write_regions
from zoomlens.ui.cli import io
from zoomlens.ui.cli.common import (
    add_checkpoint_argument,
    add_config_arguments,
    add_data_arguments,
    checkpoints,
    data_dir,
    load_config,
    split_of,
)


def setup_parser(subparsers):
    parser = subparsers.add_parser(
        "sample",
        exit_on_error=False,
        help="Write the zoom-in regions picked for each image.",
    )
    add_config_arguments(parser)
    add_data_arguments(parser, split="test")
    add_checkpoint_argument(parser, ensemble=False)
    parser.add_argument(
        "--overlay", action="store_true", help="Also write attention overlay PNGs."
    )

    parser.set_defaults(func=sample)


def sample(namespace):
    config = load_config(namespace)
    paths = checkpoints(namespace)
    out_dir = namespace.out / EVAL_DIR
    if (out_dir / REGIONS_FILE).exists() and not namespace.force:
        raise OutputExistsError(f"Output directory '{out_dir}' is not empty.")

    dataset = load_data(config, data_dir(namespace), split_of(namespace))
    predictions = predict_dataset(
        load_models(config, paths), dataset, config, keep_images=namespace.overlay
    )
    path = write_regions(predictions, out_dir)
    io.output(f"Wrote regions of {len(predictions)} image(s) to '{path}'.")

    if namespace.overlay:
        overlays = write_overlays(predictions, out_dir)
        io.output(f"Wrote {len(overlays)} overlay(s).")
