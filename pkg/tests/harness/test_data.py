import pytest

from tests.conftest import TINY_RUN
from zoomlens.constants import MANIFEST_FILE_NAME
from zoomlens.exceptions import InvalidArgumentError, NotFoundError
from zoomlens.harness.config import RunConfig
from zoomlens.harness.data import CONFIG_FILE, load_data
from zoomlens.harness.manifest import RunManifest


class TestGenerateData:
    def test_records_manifest_and_config(self, tiny_data_dir):
        config = RunConfig(**TINY_RUN)
        manifest = RunManifest.load(tiny_data_dir / MANIFEST_FILE_NAME)
        assert manifest.config_hash == config.config_hash()
        assert manifest.seed == config.seed
        assert manifest.stages == ["gen-data"]
        assert RunConfig.load(tiny_data_dir / CONFIG_FILE) == config

    def test_splits(self, tiny_run_config, tiny_data_dir):
        assert len(load_data(tiny_run_config, tiny_data_dir, "train")) == 6
        assert len(load_data(tiny_run_config, tiny_data_dir, "val")) == 0
        assert len(load_data(tiny_run_config, tiny_data_dir, "test")) == 4
        assert len(load_data(tiny_run_config, tiny_data_dir)) == 10


class TestLoadData:
    def test_labels_csv_setting_wins(self, tiny_run_config, tiny_data_dir, tmp_path):
        config = tiny_run_config.replace(labels_csv=str(tiny_data_dir / "labels.csv"))
        assert len(load_data(config, tmp_path)) == 10

    def test_nothing_to_load_raises(self, tiny_run_config):
        with pytest.raises(NotFoundError):
            load_data(tiny_run_config, None)

    def test_missing_labels_raises(self, tiny_run_config, tmp_path):
        with pytest.raises(NotFoundError):
            load_data(tiny_run_config, tmp_path)


class TestManifest:
    def test_round_trip(self, tmp_path):
        manifest = RunManifest("abc", 3, version="v0.1.0", stages=["train"])
        manifest.record_losses(1, [2.0, 1.5])
        manifest.save(tmp_path / MANIFEST_FILE_NAME)
        assert RunManifest.load(tmp_path / MANIFEST_FILE_NAME) == manifest

    def test_missing_raises(self, tmp_path):
        with pytest.raises(NotFoundError):
            RunManifest.load(tmp_path / MANIFEST_FILE_NAME)

    def test_invalid_json_raises(self, tmp_path):
        (tmp_path / MANIFEST_FILE_NAME).write_text("{")
        with pytest.raises(InvalidArgumentError):
            RunManifest.load(tmp_path / MANIFEST_FILE_NAME)

    def test_version_is_described(self):
        assert RunManifest("abc", 3).version
