from zoomlens.harness.data import load_data
from zoomlens.harness.pipeline import CHECKPOINT_DIR
from zoomlens.harness.train import Trainer
from zoomlens.requests import Post, listen, stop_listening_to_all
from zoomlens.ui.cli import io
from zoomlens.ui.cli.common import (
    add_config_arguments,
    add_data_arguments,
    data_dir,
    ensure_writable,
    load_config,
    split_of,
)


def setup_parser(subparsers):
    parser = subparsers.add_parser(
        "train", exit_on_error=False, help="Run the training phases."
    )
    add_config_arguments(parser)
    add_data_arguments(parser, split="train")
    parser.add_argument(
        "--every", type=int, default=50, help="Print the loss every N updates."
    )

    parser.set_defaults(func=train)


class _Progress:
    def __init__(self, every: int):
        self.every = max(every, 1)
        listen(self, Post.TRAIN_UPDATE_DONE, self.on_update_done)
        listen(self, Post.TRAIN_PHASE_DONE, self.on_phase_done)

    def on_update_done(self, phase: int, step: int, loss: float):
        if (step + 1) % self.every == 0:
            io.output(f"phase {phase} update {step + 1}: loss {loss:.4f}")

    @staticmethod
    def on_phase_done(phase: int, path):
        io.output(f"phase {phase} done, saved '{path}'.")


def train(namespace):
    config = load_config(namespace)
    out_dir = namespace.out / CHECKPOINT_DIR
    ensure_writable(out_dir, namespace.force)
    dataset = load_data(config, data_dir(namespace), split_of(namespace))
    io.output(f"Training on {len(dataset.pairs)} pairs.")

    progress = _Progress(namespace.every)
    try:
        result = Trainer(config, dataset, out_dir).train()
    finally:
        stop_listening_to_all(progress)

    io.output(f"Saved final model to '{result.final_checkpoint}'.")
