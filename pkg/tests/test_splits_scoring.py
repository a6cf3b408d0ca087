"""Selection vectors, candidate recommendation, split scoring."""

import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from revfrf.errors import ValidationError
from revfrf.forest.scoring import gini_score, mse_score, select_best_split
from revfrf.forest.splits import partition, recommend_splits, sample_feature_subset, sign


def test_sign_cases():
    assert sign(5) == 1
    assert sign(0) == 0
    assert sign(-3) == 0
    assert sign(0.001) == 1


def test_partition_example():
    rows = np.arange(4)
    w = np.array([1, -1, 0, 1], dtype=np.int8)
    d1, d2 = partition(w, rows)
    assert d1.tolist() == [0, 3]
    assert d2.tolist() == [1]


def test_partition_all_zero_and_symmetry():
    rows = np.arange(5)
    w = np.zeros(5, dtype=np.int8)
    d1, d2 = partition(w, rows)
    assert len(d1) == 0 and len(d2) == 0
    w = np.array([1, -1, 1, 0, -1], dtype=np.int8)
    a1, a2 = partition(w, rows)
    b1, b2 = partition(-w, rows)
    assert a1.tolist() == b2.tolist() and a2.tolist() == b1.tolist()


def test_partition_covers_selected_rows_disjointly():
    rng = random.Random(1)
    for _ in range(50):
        n = rng.randrange(1, 30)
        w = np.array([rng.choice([-1, 0, 1]) for _ in range(n)], dtype=np.int8)
        rows = np.arange(n)
        d1, d2 = partition(w, rows)
        assert set(d1) | set(d2) == set(np.flatnonzero(w != 0))
        assert not (set(d1) & set(d2))


def test_partition_length_mismatch():
    with pytest.raises(ValidationError):
        partition(np.array([1, -1]), np.arange(3))


def test_mse_examples():
    assert mse_score([2, 2], [5, 5]) == 0.0
    assert mse_score([0, 2], [10]) == pytest.approx(1.0)
    assert mse_score([10], [0, 2]) == pytest.approx(1.0)  # symmetric
    assert mse_score([], [1, 2, 3]) == mse_score([1, 2, 3], [])


def test_gini_examples():
    assert gini_score([1, 1, 1], [2, 2]) == 0.0
    assert gini_score([1, 2], [1, 1]) == pytest.approx(0.5)
    assert gini_score([3, 3, 3], [3]) == 0.0  # single class
    assert gini_score([], [1, 2]) == pytest.approx(0.5)


def _mse_oracle(d1, d2):
    total = 0.0
    for d in (d1, d2):
        if len(d):
            mean = sum(d) / len(d)
            total += sum((v - mean) ** 2 for v in d) / len(d)
    return total


def _gini_oracle(d1, d2):
    total = 0.0
    for d in (d1, d2):
        if len(d):
            total += 1.0 - sum((d.count(c) / len(d)) ** 2 for c in set(d))
    return total


def test_scores_match_bruteforce_oracles():
    rng = random.Random(7)
    for _ in range(1000):
        d1 = [rng.randrange(4) for _ in range(rng.randrange(0, 8))]
        d2 = [rng.randrange(4) for _ in range(rng.randrange(0, 8))]
        if not d1 and not d2:
            continue
        assert mse_score(d1, d2) == pytest.approx(_mse_oracle(d1, d2))
        assert gini_score(d1, d2) == pytest.approx(_gini_oracle(d1, d2))


def test_recommend_splits_example():
    column = np.array([1.0, 2.0, 3.0, 4.0])
    mu = np.ones(4, dtype=np.uint8)
    cand, vectors = recommend_splits(column, mu, varrho=4, varsigma=3, rng=random.Random(0))
    assert cand.thresholds == (1.0, 2.5, 4.0)
    assert vectors[1].tolist() == [-1, -1, 1, 1]
    assert vectors[0].tolist() == [-1, 1, 1, 1]
    assert vectors[2].tolist() == [-1, -1, -1, -1]


def test_recommend_splits_degenerate_range():
    column = np.array([5.0, 7.0, 5.0])
    mu = np.array([1, 0, 1], dtype=np.uint8)
    cand, vectors = recommend_splits(column, mu, varrho=8, varsigma=4, rng=random.Random(0))
    assert cand.thresholds == (5.0,)
    assert len(vectors) == 1
    assert vectors[0].tolist() == [-1, 0, -1]


def test_recommend_splits_single_selected_row():
    column = np.array([3.0, 9.0])
    mu = np.array([0, 1], dtype=np.uint8)
    cand, vectors = recommend_splits(column, mu, varrho=4, varsigma=3, rng=random.Random(0))
    assert cand.thresholds == (9.0,)
    assert vectors[0].tolist() == [0, -1]


def test_recommend_splits_requires_selected_rows():
    with pytest.raises(ValidationError):
        recommend_splits(np.array([1.0]), np.zeros(1, dtype=np.uint8), 2, 2, random.Random(0))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 100), min_size=2, max_size=20), st.integers(0, 10**6))
def test_deselected_rows_always_zero(values, seed):
    column = np.array(values)
    rng = random.Random(seed)
    mu = np.array([rng.randrange(2) for _ in values], dtype=np.uint8)
    if not mu.any():
        mu[0] = 1
    _cand, vectors = recommend_splits(column, mu, 4, 3, rng)
    for w in vectors:
        assert np.all(w[mu == 0] == 0)
        assert np.all(w[mu == 1] != 0)


def test_subsample_respects_varrho():
    column = np.arange(100.0)
    mu = np.ones(100, dtype=np.uint8)
    cand, _ = recommend_splits(column, mu, varrho=5, varsigma=3, rng=random.Random(4))
    # the range comes from 5 subsampled rows, not the full column
    assert cand.x_max - cand.x_min < 99.0


def test_sample_feature_subset_sqrt_rule():
    rng = random.Random(0)
    subset = sample_feature_subset(range(10), rng)
    assert len(subset) == 4  # ceil(sqrt(10))
    assert subset == tuple(sorted(subset))
    assert sample_feature_subset([7], rng) == (7,)
    assert len(sample_feature_subset(range(9), rng)) == 3
    assert len(sample_feature_subset(range(10), rng, size=2)) == 2


def _cands(*specs):
    return [(p, f, i, np.array(w, dtype=np.int8)) for (p, f, i, w) in specs]


def test_select_best_pure_split_wins():
    labels = np.array([0, 0, 1, 1])
    best = select_best_split(
        _cands(
            (3, 0, 0, [-1, 1, -1, 1]),
            (4, 1, 0, [-1, -1, 1, 1]),
        ),
        labels,
        task=1,
    )
    assert (best.participant, best.feature_id) == (4, 1)
    assert best.score == 0.0


def test_select_best_tie_keeps_first_seen():
    labels = np.array([0, 1, 0, 1])
    a = [-1, 1, -1, 1]
    best = select_best_split(
        _cands((3, 0, 0, a), (3, 0, 1, a), (4, 1, 0, a)), labels, task=1
    )
    assert (best.participant, best.feature_id, best.index) == (3, 0, 0)


def test_select_best_empty_child_deprioritized():
    labels = np.array([0, 1, 1, 1])
    best = select_best_split(
        _cands(
            (3, 0, 0, [-1, -1, -1, -1]),  # one empty child, score 0 + impurity
            (4, 1, 0, [-1, 1, 1, 1]),  # two children, worse-looking gini
        ),
        labels,
        task=1,
    )
    assert best.participant == 4
    assert best.empty_children == 0


def test_select_best_all_zero_signals_no_split():
    labels = np.array([0, 1])
    z = [0, 0]
    assert select_best_split(_cands((3, 0, 0, z), (4, 1, 0, z)), labels, task=1) is None
    assert select_best_split([], labels, task=1) is None


def test_winner_minimizes_among_full_candidates():
    rng = random.Random(11)
    labels = np.array([rng.randrange(3) for _ in range(12)])
    cands = _cands(
        *[
            (3 + i % 2, i, j, [rng.choice([-1, 1]) for _ in range(12)])
            for i in range(4)
            for j in range(3)
        ]
    )
    best = select_best_split(cands, labels, task=1)
    for _p, _f, _i, w in cands:
        assert best.score <= gini_score(labels[w == 1], labels[w == -1]) + 1e-12
