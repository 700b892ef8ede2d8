from zoomlens.harness.cluster import cluster_lesions
from zoomlens.harness.data import load_data
from zoomlens.harness.evaluate import load_models
from zoomlens.harness.pipeline import CLUSTER_DIR
from zoomlens.ui.cli import io
from zoomlens.ui.cli.common import (
    add_checkpoint_argument,
    add_config_arguments,
    add_data_arguments,
    checkpoints,
    data_dir,
    ensure_writable,
    load_config,
    split_of,
)


def setup_parser(subparsers):
    parser = subparsers.add_parser(
        "cluster",
        exit_on_error=False,
        help="Group attended lesion patches by affinity propagation.",
    )
    add_config_arguments(parser)
    add_data_arguments(parser, split="test")
    add_checkpoint_argument(parser, ensemble=False)

    parser.set_defaults(func=cluster)


def cluster(namespace):
    config = load_config(namespace)
    paths = checkpoints(namespace)
    out_dir = namespace.out / CLUSTER_DIR
    ensure_writable(out_dir, namespace.force)

    dataset = load_data(config, data_dir(namespace), split_of(namespace))
    model = load_models(config, paths)[0]
    outcome = cluster_lesions(config, model, dataset, out_dir)

    io.tabulate(
        ["exemplar", "image", "members"],
        [
            [str(k), outcome.points[k].image_id, str(len(members))]
            for k, members in outcome.result.clusters().items()
        ],
    )
    io.output(f"Wrote assignments and {len(outcome.montages)} montage(s) to '{out_dir}'.")
