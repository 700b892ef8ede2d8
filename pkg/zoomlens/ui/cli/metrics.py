from pathlib import Path

from zoomlens import errors
from zoomlens.harness.evaluate import CURVES_FILE, METRICS_FILE, report_from_files
from zoomlens.ui.cli import io
from zoomlens.ui.cli.common import ensure_writable, load_config, show_report


def setup_parser(subparsers):
    parser = subparsers.add_parser(
        "metrics",
        exit_on_error=False,
        help="Recompute metrics from a predictions CSV.",
    )
    parser.add_argument("predictions", type=Path, help="Predictions CSV.")
    parser.add_argument(
        "--lesions", type=Path, default=None, help="Ground-truth boxes CSV."
    )
    parser.add_argument(
        "--regions", type=Path, default=None, help="Sampled regions CSV."
    )
    parser.add_argument("--config", type=Path, default=None, help="TOML run config.")
    parser.add_argument(
        "--out", type=Path, default=None, help="Write metrics.json and curves.csv here."
    )
    parser.add_argument(
        "--force", action="store_true", help="Overwrite existing outputs."
    )

    parser.set_defaults(func=metrics)


def metrics(namespace):
    config = load_config(namespace)
    report, row_errors = report_from_files(
        namespace.predictions, config, namespace.lesions, namespace.regions
    )
    if row_errors:
        errors.display(
            errors.DATASET_ROW_ERRORS,
            len(row_errors),
            namespace.predictions,
            "\n".join(row_errors),
        )

    show_report(report, config.iom_threshold)
    if namespace.out is not None:
        ensure_writable(namespace.out, namespace.force)
        namespace.out.mkdir(parents=True, exist_ok=True)
        report.write(namespace.out / METRICS_FILE, namespace.out / CURVES_FILE)
        io.output(f"Wrote metrics to '{namespace.out}'.")
