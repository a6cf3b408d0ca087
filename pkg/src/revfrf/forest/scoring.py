"""Split-quality scoring and the winning-candidate selection rule."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from revfrf.errors import ValidationError

__all__ = ["mse_score", "gini_score", "ScoredCandidate", "select_best_split"]

TASK_REGRESSION = 0
TASK_CLASSIFICATION = 1


def mse_score(d1_labels: np.ndarray, d2_labels: np.ndarray) -> float:
    """Unweighted sum of the two children's mean squared errors.

    An empty child contributes 0.
    """
    total = 0.0
    for labels in (d1_labels, d2_labels):
        labels = np.asarray(labels, dtype=float)
        if labels.size:
            total += float(np.mean((labels - labels.mean()) ** 2))
    return total


def gini_score(d1_labels: np.ndarray, d2_labels: np.ndarray) -> float:
    """Sum over both children of the impurity 1 - sum_j p_j^2.

    Class fractions are taken within each child; an empty child is pure by
    convention and contributes 0.
    """
    total = 0.0
    for labels in (d1_labels, d2_labels):
        labels = np.asarray(labels)
        if labels.size:
            _, counts = np.unique(labels, return_counts=True)
            p = counts / labels.size
            total += float(1.0 - np.sum(p * p))
    return total


@dataclass(frozen=True)
class ScoredCandidate:
    """One candidate split vector with its provenance and score rank."""

    participant: int
    feature_id: int
    index: int
    w: np.ndarray
    score: float
    empty_children: int


def select_best_split(
    candidates: Sequence[tuple[int, int, int, np.ndarray]],
    labels: np.ndarray,
    task: int,
) -> ScoredCandidate | None:
    """Score every candidate and return the winner, or None for no split.

    Candidates must arrive in deterministic (participant, feature, index)
    order; ties keep the first seen.  Candidates that leave a child empty
    rank behind any candidate with two non-empty children, and if even the
    best candidate routes no sample at all (an all-zero vector) the caller
    should make a leaf instead.
    """
    if not candidates:
        return None
    labels = np.asarray(labels)
    score_fn = mse_score if task == TASK_REGRESSION else gini_score
    best: ScoredCandidate | None = None
    for participant, feature_id, index, w in candidates:
        d1 = labels[w == 1]
        d2 = labels[w == -1]
        empties = int(d1.size == 0) + int(d2.size == 0)
        score = score_fn(d1, d2)
        if best is None or (empties, score) < (best.empty_children, best.score):
            best = ScoredCandidate(participant, feature_id, index, w, score, empties)
    if best is not None and best.empty_children == 2:
        return None
    return best


def check_task(task: int) -> int:
    if task not in (TASK_REGRESSION, TASK_CLASSIFICATION):
        raise ValidationError("task must be 0 (regression) or 1 (classification)")
    return task
