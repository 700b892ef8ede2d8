import itertools

import numpy as np
import pytest

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.fundus import (
    augment,
    border_box,
    crop_black_borders,
    dihedral,
    dihedral_box,
    map_box_through_crop,
    prepare_eye,
)
from zoomlens.sampler import BBox


def framed(rng, size, frame):
    inner = rng.uniform(0.2, 1.0, (3, size, size))
    return inner, np.pad(inner, ((0, 0), (frame, frame), (frame, frame)))


def mask_bounds(mask):
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return BBox(
        int(cols[0]), int(rows[0]), int(cols[-1] - cols[0] + 1), int(rows[-1] - rows[0] + 1)
    )


class TestBorders:
    def test_black_frame_is_removed(self):
        inner, image = framed(np.random.default_rng(0), 30, 10)
        assert border_box(image) == BBox(10, 10, 30, 30)
        np.testing.assert_array_equal(crop_black_borders(image), inner)

    def test_crop_resizes(self):
        _, image = framed(np.random.default_rng(1), 30, 10)
        assert crop_black_borders(image, size=16).shape == (3, 16, 16)

    def test_black_image_raises(self):
        with pytest.raises(InvalidArgumentError):
            border_box(np.zeros((3, 8, 8)))

    def test_map_box_through_crop(self):
        crop = BBox(10, 10, 80, 80)
        assert map_box_through_crop(BBox(30, 20, 8, 4), crop, 40) == BBox(10, 5, 4, 2)


class TestDihedral:
    @pytest.fixture
    def image(self):
        return np.random.default_rng(2).uniform(size=(3, 7, 7))

    def test_transforms_are_distinct(self, image):
        results = [dihedral(image, t) for t in range(8)]
        for a, b in itertools.combinations(results, 2):
            assert not np.array_equal(a, b)

    def test_group_is_closed_with_inverses(self, image):
        results = [dihedral(image, t) for t in range(8)]
        for t, u in itertools.product(range(8), repeat=2):
            composed = dihedral(dihedral(image, t), u)
            assert any(np.array_equal(composed, r) for r in results)
        for t in range(8):
            assert any(
                np.array_equal(dihedral(dihedral(image, t), u), image) for u in range(8)
            )

    def test_four_quarter_turns_are_identity(self, image):
        result = image
        for _ in range(4):
            result = dihedral(result, 1)
        np.testing.assert_array_equal(result, image)

    @pytest.mark.parametrize("transform", range(8))
    def test_box_follows_pixels(self, transform):
        size = 12
        rng = np.random.default_rng(transform)
        for _ in range(20):
            w, h = rng.integers(1, 6, 2)
            x, y = rng.integers(0, size - w + 1), rng.integers(0, size - h + 1)
            box = BBox(int(x), int(y), int(w), int(h))
            mask = np.zeros((size, size))
            mask[box.y : box.y2, box.x : box.x2] = 1

            moved = dihedral(mask, transform)
            assert dihedral_box(box, size, transform) == mask_bounds(moved > 0)

    @pytest.mark.parametrize("transform", [-1, 8])
    def test_invalid_transform_raises(self, image, transform):
        with pytest.raises(InvalidArgumentError):
            dihedral(image, transform)

    def test_non_square_raises(self):
        with pytest.raises(InvalidArgumentError):
            dihedral(np.zeros((3, 4, 5)), 1)

    def test_augment_moves_boxes_with_image(self):
        rng = np.random.default_rng(3)
        mask = np.zeros((1, 10, 10))
        mask[0, 1:4, 2:7] = 1
        image, boxes, transform = augment(mask, rng, [BBox(2, 1, 5, 3)])
        assert 0 <= transform < 8
        assert boxes == [mask_bounds(image[0] > 0)]


class TestPrepareEye:
    def test_shapes_and_boxes(self):
        _, image = framed(np.random.default_rng(4), 40, 10)
        prepared = prepare_eye(image, [BBox(30, 30, 8, 8)], 20, 40)
        assert prepared.low.shape == (3, 20, 20)
        assert prepared.high.shape == (3, 40, 40)
        assert prepared.boxes == [BBox(10, 10, 4, 4)]
        assert prepared.transform == 0

    def test_transform_shared_by_resolutions(self):
        _, image = framed(np.random.default_rng(5), 40, 10)
        plain = prepare_eye(image, [], 20, 40)
        for seed in range(10):
            prepared = prepare_eye(image, [], 20, 40, rng=np.random.default_rng(seed))
            np.testing.assert_array_equal(
                prepared.low, dihedral(plain.low, prepared.transform)
            )
            np.testing.assert_array_equal(
                prepared.high, dihedral(plain.high, prepared.transform)
            )

    def test_augmentation_matches_augment(self):
        _, image = framed(np.random.default_rng(6), 40, 10)
        plain = prepare_eye(image, [BBox(30, 30, 8, 8)], 20, 40)
        for seed in range(8):
            prepared = prepare_eye(
                image, [BBox(30, 30, 8, 8)], 20, 40, rng=np.random.default_rng(seed)
            )
            low, boxes, transform = augment(plain.low, np.random.default_rng(seed), plain.boxes)
            assert prepared.transform == transform
            assert prepared.boxes == boxes
            np.testing.assert_array_equal(prepared.low, low)
