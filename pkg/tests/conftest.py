import numpy as np
import pytest

from zoomlens import settings
from zoomlens.harness.config import RunConfig
from zoomlens.model import EyePairBatch, ModelConfig, ZoomNet
from zoomlens.requests import Post, listen, stop_listening_to_all
from zoomlens.tensor import reset_graph

TINY_MODEL = dict(
    input_size=28,
    grid_size=4,
    mnet_widths=(4, 4, 4, 4, 4),
    anet_hidden=4,
    cnet_grid_size=3,
    cnet_widths=(4, 4, 4, 4),
    high_res_size=56,
    patch_size=20,
    region_size=8,
    regions=2,
)

TINY_RUN = dict(
    seed=3,
    train_pairs=6,
    test_pairs=4,
    val_fraction=0.0,
    render_size=64,
    input_size=28,
    high_res_scale=2.0,
    augment=False,
    grid_size=4,
    mnet_widths=(4, 4, 4, 4, 4),
    anet_hidden=4,
    cnet_grid_size=3,
    cnet_widths=(4, 4, 4, 4),
    patch_size=20,
    patch_reference_size=56,
    region_size=8,
    reference_size=28,
    regions=2,
    learning_rate=1e-4,
    desk_lr_scale=100.0,
    accumulation=1,
    phase1_steps=2,
    phase2_steps=2,
    phase3_steps=2,
    top_k=2,
    max_iter=100,
    stable_iters=10,
    max_images=4,
    montage_tiles=4,
)


class ZoomlensErrors:
    def __init__(self):
        listen(self, Post.DISPLAY_ERROR, self._on_display_error)
        self.errors = []

    def _on_display_error(self, title, message):
        self.errors.append({"title": title, "message": message})

    def assert_error(self):
        assert self.errors

    def assert_in_error_message(self, string: str):
        assert string in self.errors[0]["message"]

    def assert_in_error_title(self, string: str):
        assert string in self.errors[0]["title"]

    def reset(self):
        self.errors = []
        stop_listening_to_all(self)


@pytest.fixture(autouse=True)
def clean_state():
    reset_graph()
    settings.load(None)
    yield
    reset_graph()
    settings.load(None)


@pytest.fixture
def zoomlens_errors():
    errors = ZoomlensErrors()
    yield errors
    errors.reset()


@pytest.fixture
def tiny_model_config():
    return ModelConfig(**TINY_MODEL)


@pytest.fixture
def tiny_model(tiny_model_config):
    return ZoomNet(tiny_model_config, seed=0)


@pytest.fixture
def tiny_run_config():
    return RunConfig(**TINY_RUN)


def random_image(rng, size):
    return rng.uniform(0, 1, size=(3, size, size))


@pytest.fixture
def low_res_pair():
    rng = np.random.default_rng(11)
    return EyePairBatch(random_image(rng, 28), random_image(rng, 28), 2, 3, "p00000")


@pytest.fixture
def high_res_pair():
    rng = np.random.default_rng(12)
    return EyePairBatch(random_image(rng, 56), random_image(rng, 56), 2, 3, "p00000")
