import numpy as np
import pytest

from zoomlens.exceptions import InvalidArgumentError, NotFoundError
from zoomlens.tensor import Tensor, checkpoint


class TestCheckpoint:
    def test_save_and_load(self, tmp_path):
        tensors = {
            "mnet.trunk.blocks.0.weight": Tensor(np.arange(6.0).reshape(1, 2, 3)),
            "head.bias": np.array([0.5, -0.25]),
        }
        path = tmp_path / "model.zlt"
        checkpoint.save(path, tensors)

        loaded = checkpoint.load(path)

        assert list(loaded) == list(tensors)
        np.testing.assert_array_equal(
            loaded["mnet.trunk.blocks.0.weight"], np.arange(6.0).reshape(1, 2, 3)
        )
        np.testing.assert_array_equal(loaded["head.bias"], [0.5, -0.25])

    def test_header_layout(self):
        raw = checkpoint.dumps({"w": np.zeros((2, 3))})
        header, payload = raw.split(b"\n\n", 1)
        assert header == b"ZLT1\nw 2 2 3"
        assert len(payload) == 6 * 8

    def test_payload_is_little_endian(self):
        raw = checkpoint.dumps({"x": np.array([1.0])})
        assert raw.endswith(np.array([1.0], dtype="<f8").tobytes())

    def test_bad_magic_raises(self):
        with pytest.raises(InvalidArgumentError):
            checkpoint.loads(b"NOPE\nw 1 1\n\n" + bytes(8))

    def test_truncated_payload_raises(self):
        raw = checkpoint.dumps({"w": np.zeros(4)})
        with pytest.raises(InvalidArgumentError):
            checkpoint.loads(raw[:-8])

    def test_trailing_bytes_raise(self):
        raw = checkpoint.dumps({"w": np.zeros(1)})
        with pytest.raises(InvalidArgumentError):
            checkpoint.loads(raw + b"x")

    def test_name_with_space_raises(self):
        with pytest.raises(InvalidArgumentError):
            checkpoint.dumps({"bad name": np.zeros(1)})

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(NotFoundError):
            checkpoint.load(tmp_path / "missing.zlt")
