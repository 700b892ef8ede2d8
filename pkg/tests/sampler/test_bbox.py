import pytest

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.sampler import BBox


class TestBBox:
    @pytest.mark.parametrize("args", [(0, 0, 0, 1), (0, 0, 1, -1), (-1, 0, 1, 1)])
    def test_invalid_boxes_raise(self, args):
        with pytest.raises(InvalidArgumentError):
            BBox(*args)

    def test_intersection(self):
        assert BBox(0, 0, 4, 4).intersection_area(BBox(2, 2, 4, 4)) == 4
        assert BBox(0, 0, 2, 2).intersection_area(BBox(2, 0, 2, 2)) == 0

    def test_centered_clamps_inside(self):
        assert BBox.centered(1, 1, 4, 10, 10) == BBox(0, 0, 4, 4)
        assert BBox.centered(9, 9, 4, 10, 10) == BBox(6, 6, 4, 4)
        assert BBox.centered(5, 5, 4, 10, 10) == BBox(3, 3, 4, 4)

    def test_centered_too_large_raises(self):
        with pytest.raises(InvalidArgumentError):
            BBox.centered(5, 5, 11, 10, 10)

    def test_scaled(self):
        assert BBox(2, 4, 6, 8).scaled(0.5) == BBox(1, 2, 3, 4)
        assert BBox(0, 0, 1, 1).scaled(0.1) == BBox(0, 0, 1, 1)

    def test_clamped(self):
        assert BBox(8, 8, 4, 4).clamped(10, 10) == BBox(6, 6, 4, 4)
        assert BBox(0, 0, 20, 4).clamped(10, 10) == BBox(0, 0, 10, 4)
