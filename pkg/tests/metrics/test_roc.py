import numpy as np
import pytest

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.metrics import roc_auc, sensitivity_at_specificity


def auc_from_pairs(scores, labels):
    positives = [s for s, l in zip(scores, labels) if l == 1]
    negatives = [s for s, l in zip(scores, labels) if l == 0]
    total = 0.0
    for p in positives:
        for n in negatives:
            total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(positives) * len(negatives))


def sensitivity_from_sweep(scores, labels, specificity):
    best = 0.0
    for t in sorted(set(scores)) + [np.inf]:
        tn = sum(1 for s, l in zip(scores, labels) if l == 0 and s < t)
        tp = sum(1 for s, l in zip(scores, labels) if l == 1 and s >= t)
        n_neg = labels.count(0)
        n_pos = labels.count(1)
        if tn / n_neg >= specificity:
            best = max(best, tp / n_pos)
    return best


def random_fixture(seed, size):
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, size=size)
    labels[0], labels[1] = 0, 1
    # rounding makes ties common
    scores = np.round(rng.uniform(size=size) + 0.3 * labels, 1)
    return scores.tolist(), labels.tolist()


class TestRocAuc:
    def test_example(self):
        assert roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75

    def test_all_tied_is_half(self):
        assert roc_auc([0.5] * 4, [0, 1, 0, 1]) == 0.5

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_pair_count(self, seed):
        scores, labels = random_fixture(seed, 1000 if seed < 5 else 60)
        assert roc_auc(scores, labels) == pytest.approx(
            auc_from_pairs(scores, labels), abs=1e-12
        )

    def test_one_class_raises(self):
        with pytest.raises(InvalidArgumentError):
            roc_auc([0.1, 0.2], [1, 1])

    def test_bad_labels_raise(self):
        with pytest.raises(InvalidArgumentError):
            roc_auc([0.1, 0.2], [0, 2])


class TestSensitivityAtSpecificity:
    def test_example(self):
        scores = [0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9]
        labels = [0, 0, 0, 1, 0, 1, 1, 1]
        # t = 0.4: three of four negatives below, all four positives above
        assert sensitivity_at_specificity(scores, labels, 0.5) == 1.0
        # t = 0.7: every negative below, three positives above
        assert sensitivity_at_specificity(scores, labels, 1.0) == 0.75

    @pytest.mark.parametrize("seed", range(200))
    @pytest.mark.parametrize("specificity", [0.0, 0.5, 0.9])
    def test_matches_sweep(self, seed, specificity):
        scores, labels = random_fixture(seed, 40)
        assert sensitivity_at_specificity(scores, labels, specificity) == pytest.approx(
            sensitivity_from_sweep(scores, labels, specificity), abs=1e-12
        )

    def test_specificity_out_of_range_raises(self):
        with pytest.raises(InvalidArgumentError):
            sensitivity_at_specificity([0.1, 0.9], [0, 1], 1.5)
