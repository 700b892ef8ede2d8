"""
Affinity propagation over a dense similarity matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from zoomlens.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

TIE_NOISE = 1e-12


@dataclass
class SimilarityMatrix:
    """values[i, k] = -|f_i - f_k|^2 off the diagonal, the preference on it."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise InvalidArgumentError(
                f"Similarity matrix must be square, got {self.values.shape}."
            )
        if not self.values.size:
            raise InvalidArgumentError("Similarity matrix is empty.")
        if not np.all(np.isfinite(self.values)):
            raise InvalidArgumentError("Similarity matrix has non-finite entries.")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_features(
        cls, features: np.ndarray, preference: float | None = None
    ) -> SimilarityMatrix:
        """Preference defaults to the median off-diagonal similarity."""
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2:
            raise InvalidArgumentError("Features must be an n x d matrix.")
        squared = (features**2).sum(axis=1)
        values = -(squared[:, None] + squared[None, :] - 2 * features @ features.T)
        values = np.minimum(values, 0.0)

        n = features.shape[0]
        if preference is None:
            off_diagonal = values[~np.eye(n, dtype=bool)]
            preference = float(np.median(off_diagonal)) if off_diagonal.size else 0.0
        np.fill_diagonal(values, preference)
        return cls(values)


@dataclass
class ClusterResult:
    exemplar_of: np.ndarray
    exemplars: list[int]
    iterations: int
    converged: bool

    def clusters(self) -> dict[int, list[int]]:
        """Members of each cluster, exemplar first, the rest by index."""
        return {
            k: [k] + [i for i in np.flatnonzero(self.exemplar_of == k) if i != k]
            for k in self.exemplars
        }

    def net_similarity(self, similarity: SimilarityMatrix) -> float:
        rows = np.arange(len(self.exemplar_of))
        return float(similarity.values[rows, self.exemplar_of].sum())


def assign(values: np.ndarray, exemplars: np.ndarray) -> np.ndarray:
    exemplar_of = exemplars[np.argmax(values[:, exemplars], axis=1)]
    exemplar_of[exemplars] = exemplars
    return exemplar_of


def _refine(values: np.ndarray, exemplar_of: np.ndarray) -> np.ndarray:
    """Moves each exemplar to the member with the largest in-cluster similarity."""
    refined = []
    for k in np.unique(exemplar_of):
        members = np.flatnonzero(exemplar_of == k)
        refined.append(
            members[np.argmax(values[np.ix_(members, members)].sum(axis=0))]
        )
    return np.sort(np.array(refined))


def _net_similarity(values: np.ndarray, exemplars: np.ndarray) -> float:
    return float(values[np.arange(len(values)), assign(values, exemplars)].sum())


def _polish(values: np.ndarray, exemplars: np.ndarray) -> np.ndarray:
    """
    Single-exemplar add, drop and swap moves, taken while one raises the net
    similarity. Moves are tried in index order.
    """
    n = len(values)
    current = set(int(k) for k in exemplars)
    best = _net_similarity(values, np.array(sorted(current)))
    improved = True
    while improved:
        improved = False
        candidates = [current | {k} for k in range(n) if k not in current]
        if len(current) > 1:
            candidates += [current - {k} for k in sorted(current)]
        candidates += [
            (current - {k}) | {j}
            for k in sorted(current)
            for j in range(n)
            if j not in current
        ]
        for candidate in candidates:
            score = _net_similarity(values, np.array(sorted(candidate)))
            if score > best + 1e-12:
                current, best, improved = candidate, score, True
                break
    return np.array(sorted(current))


def ap_cluster(
    similarity: SimilarityMatrix,
    damping: float = 0.5,
    max_iter: int = 500,
    stable_iters: int = 50,
    seed: int = 0,
    polish: bool = False,
) -> ClusterResult:
    """
    Damped responsibility/availability updates. Points with
    r(k,k) + a(k,k) > 0 are exemplars; the run converges once that set has
    not changed for 'stable_iters' sweeps. Seeded noise of 1e-12 breaks
    exact ties. If no point qualifies, the one with the largest
    r(k,k) + a(k,k) is the only exemplar. Each point goes to the exemplar it
    is most similar to.

    With 'polish', each exemplar first moves to the member most similar to
    the rest of its cluster, then single add, drop and swap moves are taken
    while they raise the net similarity.
    """
    if not 0.5 <= damping < 1:
        raise InvalidArgumentError(f"damping must be in [0.5, 1), got {damping}.")
    if max_iter < 1 or stable_iters < 1:
        raise InvalidArgumentError("max_iter and stable_iters must be positive.")

    n = similarity.n
    if n == 1:
        return ClusterResult(np.zeros(1, dtype=np.int64), [0], 0, True)

    # all points equally similar: message passing has nothing to separate
    off_diagonal = similarity.values[~np.eye(n, dtype=bool)]
    if np.all(off_diagonal == off_diagonal[0]):
        if np.all(np.diag(similarity.values) <= off_diagonal[0]):
            return ClusterResult(np.zeros(n, dtype=np.int64), [0], 0, True)
        return ClusterResult(np.arange(n), list(range(n)), 0, True)

    rng = np.random.default_rng(seed)
    s = similarity.values + rng.uniform(-TIE_NOISE, TIE_NOISE, size=(n, n))
    rows = np.arange(n)
    r = np.zeros((n, n))
    a = np.zeros((n, n))

    previous = None
    unchanged = 0
    converged = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        scaled = a + s
        best = np.argmax(scaled, axis=1)
        first = scaled[rows, best]
        scaled[rows, best] = -np.inf
        second = scaled.max(axis=1)

        r_new = s - first[:, None]
        r_new[rows, best] = s[rows, best] - second
        r = damping * r + (1 - damping) * r_new

        positive = np.maximum(r, 0)
        positive[rows, rows] = r[rows, rows]
        a_new = positive.sum(axis=0)[None, :] - positive
        self_availability = a_new[rows, rows].copy()
        a_new = np.minimum(a_new, 0)
        a_new[rows, rows] = self_availability
        a = damping * a + (1 - damping) * a_new

        current = (r[rows, rows] + a[rows, rows]) > 0
        if previous is not None and np.array_equal(current, previous):
            unchanged += 1
        else:
            unchanged = 0
        previous = current
        if unchanged >= stable_iters and current.any():
            converged = True
            break

    evidence = r[rows, rows] + a[rows, rows]
    exemplars = np.flatnonzero(evidence > 0)
    if not exemplars.size:
        exemplars = np.array([int(np.argmax(evidence))])

    if polish:
        exemplars = _refine(similarity.values, assign(similarity.values, exemplars))
        exemplars = _polish(similarity.values, exemplars)
    exemplar_of = assign(similarity.values, exemplars)

    if not converged:
        logger.warning(f"Affinity propagation did not converge in {max_iter} sweeps.")
    logger.debug(
        f"Affinity propagation found {exemplars.size} exemplar(s) in {iteration} sweeps."
    )
    return ClusterResult(exemplar_of, [int(k) for k in exemplars], iteration, converged)
