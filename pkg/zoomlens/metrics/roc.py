from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.stats

from zoomlens.exceptions import InvalidArgumentError


def _split(scores: Sequence[float], labels: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise InvalidArgumentError("scores and labels must be flat and of equal length.")
    if not np.all(np.isin(labels, (0, 1))):
        raise InvalidArgumentError("labels must be 0 or 1.")
    if not np.all(np.isfinite(scores)):
        raise InvalidArgumentError("scores must be finite.")

    positives = scores[labels == 1]
    negatives = scores[labels == 0]
    if not positives.size or not negatives.size:
        raise InvalidArgumentError("Need at least one positive and one negative sample.")
    return positives, negatives


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Mann-Whitney statistic with mid-ranks for ties."""
    positives, negatives = _split(scores, labels)
    ranks = scipy.stats.rankdata(np.concatenate([positives, negatives]))
    n_pos, n_neg = positives.size, negatives.size
    u_statistic = ranks[:n_pos].sum() - n_pos * (n_pos + 1) / 2
    return float(u_statistic / (n_pos * n_neg))


def sensitivity_at_specificity(
    scores: Sequence[float], labels: Sequence[int], specificity: float = 0.5
) -> float:
    """
    Best sensitivity among thresholds t (positive iff score >= t) whose
    specificity is at least 'specificity'.
    """
    if not 0 <= specificity <= 1:
        raise InvalidArgumentError("specificity must be in [0, 1].")
    positives, negatives = _split(scores, labels)
    positives = np.sort(positives)
    negatives = np.sort(negatives)

    thresholds = np.append(np.unique(np.concatenate([positives, negatives])), np.inf)
    spec = np.searchsorted(negatives, thresholds, side="left") / negatives.size
    sens = 1 - np.searchsorted(positives, thresholds, side="left") / positives.size
    return float(sens[spec >= specificity].max())
