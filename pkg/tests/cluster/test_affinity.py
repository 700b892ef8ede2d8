import itertools

import numpy as np
import pytest

from zoomlens.cluster import SimilarityMatrix, ap_cluster
from zoomlens.exceptions import InvalidArgumentError

TRIADS = np.array(
    [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [10.0, 10.0], [10.0, 11.0], [11.0, 10.0]]
)


def best_net_similarity(values: np.ndarray) -> float:
    """Tries every non-empty exemplar set."""
    n = len(values)
    best = -np.inf
    for size in range(1, n + 1):
        for exemplars in itertools.combinations(range(n), size):
            total = 0.0
            for i in range(n):
                if i in exemplars:
                    total += values[i, i]
                else:
                    total += max(values[i, k] for k in exemplars)
            best = max(best, total)
    return best


class TestSimilarityMatrix:
    def test_negative_squared_distance(self):
        sim = SimilarityMatrix.from_features(np.array([[0.0, 0.0], [3.0, 4.0]]), -1.0)
        np.testing.assert_allclose(sim.values, [[-1.0, -25.0], [-25.0, -1.0]])

    def test_median_preference(self):
        sim = SimilarityMatrix.from_features(np.array([[0.0], [1.0], [3.0]]))
        # off-diagonal: -1, -9, -4 twice each
        np.testing.assert_allclose(np.diag(sim.values), -4.0)

    @pytest.mark.parametrize(
        "values", [np.zeros((2, 3)), np.zeros((0, 0)), np.array([[0.0, np.nan], [0.0, 0.0]])]
    )
    def test_invalid_matrix_raises(self, values):
        with pytest.raises(InvalidArgumentError):
            SimilarityMatrix(values)


class TestApCluster:
    def test_two_triads(self):
        result = ap_cluster(SimilarityMatrix.from_features(TRIADS))
        assert len(result.exemplars) == 2
        clusters = [sorted(members) for members in result.clusters().values()]
        assert sorted(clusters) == [[0, 1, 2], [3, 4, 5]]

    def test_single_point(self):
        result = ap_cluster(SimilarityMatrix(np.array([[-1.0]])))
        assert result.exemplars == [0]
        assert result.exemplar_of.tolist() == [0]

    def test_identical_points_form_one_cluster(self):
        result = ap_cluster(SimilarityMatrix.from_features(np.ones((5, 3))))
        assert result.exemplars == [0]
        assert result.exemplar_of.tolist() == [0] * 5

    def test_high_preference_for_equal_points_gives_singletons(self):
        values = np.full((4, 4), -1.0)
        np.fill_diagonal(values, 0.0)
        result = ap_cluster(SimilarityMatrix(values))
        assert result.exemplars == [0, 1, 2, 3]

    def test_exemplars_belong_to_themselves(self):
        features = np.random.default_rng(0).normal(size=(30, 4))
        result = ap_cluster(SimilarityMatrix.from_features(features))
        for k in result.exemplars:
            assert result.exemplar_of[k] == k
        assert set(result.exemplar_of.tolist()) == set(result.exemplars)

    def test_same_seed_same_result(self):
        features = np.random.default_rng(1).normal(size=(20, 3))
        sim = SimilarityMatrix.from_features(features)
        a, b = ap_cluster(sim, seed=4), ap_cluster(sim, seed=4)
        assert a.exemplars == b.exemplars
        np.testing.assert_array_equal(a.exemplar_of, b.exemplar_of)

    @pytest.mark.parametrize("seed", range(100))
    def test_close_to_exhaustive_optimum(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        sim = SimilarityMatrix.from_features(rng.normal(size=(n, 2)))
        result = ap_cluster(sim, seed=seed, polish=True)
        optimum = best_net_similarity(sim.values)
        assert result.net_similarity(sim) >= optimum - 0.02 * abs(optimum)

    def test_points_join_their_most_similar_exemplar(self):
        features = np.random.default_rng(2).normal(size=(25, 3))
        sim = SimilarityMatrix.from_features(features)
        result = ap_cluster(sim)
        exemplars = np.array(result.exemplars)
        for i in set(range(25)) - set(result.exemplars):
            best = exemplars[np.argmax(sim.values[i, exemplars])]
            assert result.exemplar_of[i] == best


class TestPolish:
    # one damped sweep from zero messages leaves only point 2 with
    # r(k,k) + a(k,k) > 0: evidences are -0.25, -0.25 and 0.125
    LINE = SimilarityMatrix.from_features(np.array([[0.0], [1.0], [2.5]]), -2.0)

    def test_plain_exemplars_come_from_messages(self):
        result = ap_cluster(self.LINE, max_iter=1, stable_iters=1)
        assert result.exemplars == [2]
        assert result.exemplar_of.tolist() == [2, 2, 2]
        assert not result.converged

    def test_polish_reaches_a_better_exemplar_set(self):
        plain = ap_cluster(self.LINE, max_iter=1, stable_iters=1)
        polished = ap_cluster(self.LINE, max_iter=1, stable_iters=1, polish=True)
        assert polished.exemplars == [1, 2]
        assert polished.exemplar_of.tolist() == [1, 1, 2]
        assert polished.net_similarity(self.LINE) == pytest.approx(-5.0)
        assert plain.net_similarity(self.LINE) == pytest.approx(-10.5)
        assert best_net_similarity(self.LINE.values) == pytest.approx(-5.0)


class TestApClusterArguments:
    @pytest.mark.parametrize("damping", [0.4, 1.0])
    def test_bad_damping_raises(self, damping):
        with pytest.raises(InvalidArgumentError):
            ap_cluster(SimilarityMatrix(np.zeros((2, 2))), damping=damping)
