"""Selection vectors and candidate-split recommendation.

The per-node exchange works in three vectors: a 0/1 sample-selection
vector ``mu`` over all training rows, a 0/1 feature-selection vector ``v``
over all features, and per-candidate split vectors ``w`` whose entries are
-1 (value at or below the threshold), +1 (above) for mu-selected rows and
0 for deselected rows.  Split vectors are the only per-value artifact a
feature owner ever sends: the thresholds themselves stay local until one
of them wins and is uploaded encrypted.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from revfrf.errors import ValidationError

__all__ = ["sign", "partition", "CandidateSplits", "recommend_splits", "sample_feature_subset"]


def sign(x) -> int:
    """1 for strictly positive input, else 0."""
    return 1 if x > 0 else 0


def partition(w: np.ndarray, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split rows by a split vector: (above-threshold side, at-or-below side).

    Rows where w is 0 (deselected at this node) appear in neither part.
    """
    w = np.asarray(w)
    if len(w) != len(rows):
        raise ValidationError("split vector and row count differ")
    return rows[w == 1], rows[w == -1]


@dataclass(frozen=True)
class CandidateSplits:
    """The thresholds one feature owner generated at one node.

    ``thresholds`` are evenly spaced over the observed range of the random
    row subsample; they never leave the owner in the clear.
    """

    feature_id: int
    thresholds: tuple[float, ...]
    x_min: float
    x_max: float


def recommend_splits(
    column: np.ndarray,
    mu: np.ndarray,
    varrho: int,
    varsigma: int,
    rng: random.Random,
    feature_id: int = -1,
) -> tuple[CandidateSplits, list[np.ndarray]]:
    """Generate candidate thresholds and their split vectors for one feature.

    A subsample of ``varrho`` mu-selected rows fixes the threshold range
    (all selected rows are used when fewer than ``varrho`` are available);
    ``varsigma`` thresholds are spaced evenly across it, collapsing to a
    single threshold when the range is degenerate.  Every returned vector
    is +-1 exactly on the mu-selected rows and 0 elsewhere.
    """
    column = np.asarray(column, dtype=float)
    mu = np.asarray(mu)
    selected = np.flatnonzero(mu)
    if selected.size == 0:
        raise ValidationError("cannot recommend splits with no selected samples")
    if selected.size <= varrho:
        subsample = selected
    else:
        subsample = np.array(sorted(rng.sample(list(map(int, selected)), varrho)))
    x_min = float(column[subsample].min())
    x_max = float(column[subsample].max())
    if x_min == x_max:
        thresholds = [x_min]
    else:
        thresholds = [float(t) for t in np.linspace(x_min, x_max, varsigma)]

    vectors = []
    sel_vals = column[selected]
    for s in thresholds:
        w = np.zeros(len(column), dtype=np.int8)
        w[selected] = np.where(sel_vals <= s, -1, 1)
        vectors.append(w)
    return CandidateSplits(feature_id, tuple(thresholds), x_min, x_max), vectors


def sample_feature_subset(
    features: Sequence[int], rng: random.Random, size: int | None = None
) -> tuple[int, ...]:
    """Draw the per-node feature subset, default size ceil(sqrt(|F|))."""
    features = sorted(features)
    if size is None:
        size = math.isqrt(len(features))
        if size * size < len(features):
            size += 1
    size = max(1, min(size, len(features)))
    return tuple(sorted(rng.sample(features, size)))
