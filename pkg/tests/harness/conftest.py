import pytest

from tests.conftest import TINY_RUN
from zoomlens.harness.config import RunConfig
from zoomlens.harness.data import generate_data, load_data


@pytest.fixture(scope="session")
def tiny_data_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("tiny") / "data"
    generate_data(RunConfig(**TINY_RUN), out)
    return out


@pytest.fixture
def tiny_train_set(tiny_run_config, tiny_data_dir):
    return load_data(tiny_run_config, tiny_data_dir, "train")


@pytest.fixture
def tiny_test_set(tiny_run_config, tiny_data_dir):
    return load_data(tiny_run_config, tiny_data_dir, "test")
