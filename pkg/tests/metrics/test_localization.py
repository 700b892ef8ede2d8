import numpy as np
import pytest

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.metrics import RecallCurve, iom, recall_curves
from zoomlens.sampler import BBox

THRESHOLDS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]


def iom_from_pixels(a: BBox, b: BBox) -> float:
    inside_a = {(x, y) for x in range(a.x, a.x2) for y in range(a.y, a.y2)}
    inside_b = {(x, y) for x in range(b.x, b.x2) for y in range(b.y, b.y2)}
    return len(inside_a & inside_b) / min(len(inside_a), len(inside_b))


def random_box(rng, size=40):
    w, h = (int(v) for v in rng.integers(1, 12, size=2))
    x, y = int(rng.integers(0, size - w)), int(rng.integers(0, size - h))
    return BBox(x, y, w, h)


def recall_by_all_pairs(gt, sampled, t):
    hit_boxes = total_boxes = hit_images = total_images = 0
    for image_id, boxes in gt.items():
        if not boxes:
            continue
        total_images += 1
        image_hit = False
        for truth in boxes:
            total_boxes += 1
            if any(iom(truth, box) >= t for box in sampled.get(image_id, [])):
                hit_boxes += 1
                image_hit = True
        hit_images += image_hit
    return hit_boxes / total_boxes, hit_images / total_images


class TestIoM:
    def test_example(self):
        assert iom(BBox(0, 0, 4, 4), BBox(2, 2, 4, 4)) == 0.25

    def test_contained_box_is_one(self):
        assert iom(BBox(0, 0, 10, 10), BBox(2, 2, 3, 3)) == 1.0

    def test_disjoint_is_zero(self):
        assert iom(BBox(0, 0, 2, 2), BBox(5, 5, 2, 2)) == 0.0

    @pytest.mark.parametrize("seed", range(200))
    def test_matches_pixel_count(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_box(rng, 20), random_box(rng, 20)
        assert iom(a, b) == pytest.approx(iom_from_pixels(a, b), abs=1e-12)


class TestRecallCurves:
    def test_example(self):
        gt = {"a": [BBox(0, 0, 4, 4), BBox(20, 20, 4, 4)], "b": [BBox(0, 0, 4, 4)]}
        sampled = {"a": [BBox(2, 2, 4, 4)], "b": [BBox(10, 10, 4, 4)]}
        box, person = recall_curves(gt, sampled, [0.25, 0.5])
        assert box.at(0.25) == pytest.approx(1 / 3)
        assert person.at(0.25) == 0.5
        assert box.at(0.5) == 0.0

    def test_images_without_ground_truth_are_skipped(self):
        gt = {"a": [BBox(0, 0, 4, 4)], "empty": []}
        sampled = {"a": [BBox(0, 0, 4, 4)]}
        _, person = recall_curves(gt, sampled, [0.5])
        assert person.at(0.5) == 1.0

    def test_images_without_samples_miss(self):
        box, person = recall_curves({"a": [BBox(0, 0, 4, 4)]}, {}, [0.5])
        assert box.at(0.5) == 0.0
        assert person.at(0.5) == 0.0

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_all_pairs(self, seed):
        rng = np.random.default_rng(seed)
        gt, sampled = {}, {}
        for i in range(50):
            gt[f"img{i}"] = [random_box(rng) for _ in range(int(rng.integers(0, 5)))]
            sampled[f"img{i}"] = [random_box(rng) for _ in range(4)]

        box, person = recall_curves(gt, sampled, THRESHOLDS)

        for t in THRESHOLDS:
            expected_box, expected_person = recall_by_all_pairs(gt, sampled, t)
            assert box.at(t) == pytest.approx(expected_box, abs=1e-12)
            assert person.at(t) == pytest.approx(expected_person, abs=1e-12)

    def test_curves_do_not_increase(self):
        rng = np.random.default_rng(0)
        gt = {f"i{k}": [random_box(rng)] for k in range(30)}
        sampled = {f"i{k}": [random_box(rng) for _ in range(4)] for k in range(30)}
        box, person = recall_curves(gt, sampled, THRESHOLDS)
        assert box.recalls == sorted(box.recalls, reverse=True)
        assert person.recalls == sorted(person.recalls, reverse=True)

    def test_person_recall_at_least_box_recall_with_equal_counts(self):
        rng = np.random.default_rng(1)
        gt = {f"i{k}": [random_box(rng) for _ in range(3)] for k in range(30)}
        sampled = {f"i{k}": [random_box(rng) for _ in range(4)] for k in range(30)}
        box, person = recall_curves(gt, sampled, THRESHOLDS)
        for t in THRESHOLDS:
            assert person.at(t) >= box.at(t)

    def test_box_recall_is_pooled_over_boxes(self):
        # three hits in "a", one miss in "b": 3 of 4 boxes but 1 of 2 images
        gt = {
            "a": [BBox(0, 0, 4, 4), BBox(10, 0, 4, 4), BBox(20, 0, 4, 4)],
            "b": [BBox(0, 0, 4, 4)],
        }
        sampled = {"a": [BBox(0, 0, 24, 4)], "b": [BBox(30, 30, 4, 4)]}
        box, person = recall_curves(gt, sampled, [0.5])
        assert box.at(0.5) == 0.75
        assert person.at(0.5) == 0.5

    @pytest.mark.parametrize("t", [0.0, 1.5])
    def test_threshold_out_of_range_raises(self, t):
        with pytest.raises(InvalidArgumentError):
            recall_curves({}, {}, [t])

    def test_missing_threshold_raises(self):
        with pytest.raises(InvalidArgumentError):
            RecallCurve([(0.5, 1.0)]).at(0.3)
