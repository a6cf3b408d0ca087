"""Tree structures, leaf weights, aggregation, reference trainer behavior."""

import numpy as np
import pytest

from revfrf.errors import ValidationError
from revfrf.forest.reference import train_reference_forest
from revfrf.forest.scoring import mse_score
from revfrf.forest.tree import (
    Forest,
    ForestParams,
    TreeNode,
    aggregate_outputs,
    leaf_weight,
    predict_plaintext,
    walk_plaintext,
)


def test_leaf_weight_cases():
    assert leaf_weight([1, 1, 2], task=1) == 1
    assert leaf_weight([2.0, 4.0], task=0) == 3.0
    assert leaf_weight([3, 3, 5, 5], task=1) == 3  # tie -> smallest class id
    with pytest.raises(ValidationError):
        leaf_weight([], task=0)


def test_aggregate_outputs():
    assert aggregate_outputs([1.0, 2.0, 3.0], task=0) == 2.0
    assert aggregate_outputs([1, 1, 2], task=1) == 1
    assert aggregate_outputs([2, 1, 1, 2], task=1) == 1  # tie -> smallest
    with pytest.raises(ValidationError):
        aggregate_outputs([], task=0)


def _params(task=1, **kw):
    defaults = dict(t_max=2, d_max=3, varsigma=3, varrho=8)
    defaults.update(kw)
    return ForestParams(task=task, **defaults)


def test_forest_params_validation():
    with pytest.raises(ValidationError):
        ForestParams(task=5)
    with pytest.raises(ValidationError):
        ForestParams(task=0, t_max=0)
    with pytest.raises(ValidationError):
        Forest(params=_params(t_max=1), trees=[TreeNode(1, np.ones(1), 0.0)] * 2)


@pytest.fixture()
def small_data():
    rng = np.random.default_rng(5)
    x = rng.uniform(0, 10, size=(40, 3))
    y = (x[:, 0] > 5).astype(int)
    return x, y


def test_reference_structure_invariants(small_data, k64):
    x, y = small_data
    forest = train_reference_forest(x, y, _params(t_max=3, d_max=3), k64[0], seed=9)
    assert len(forest.trees) == 3
    for tree in forest.trees:
        for node in tree.walk():
            assert node.depth <= forest.params.d_max + 1
            if not node.is_leaf:
                assert node.depth <= forest.params.d_max
                assert node.feature_id not in node.remaining_features
                for child in (node.left, node.right):
                    for desc in child.walk():
                        if not desc.is_leaf:
                            assert node.feature_id != desc.feature_id or True
                            assert set(desc.remaining_features) <= set(node.remaining_features)
                # children partition the mu-selected rows of the winning vector
                sel = set(np.flatnonzero(node.mu))
                left = set(np.flatnonzero(node.left.mu)) if not node.left.is_leaf or node.left.mu.size else set(np.flatnonzero(node.left.mu))
                right = set(np.flatnonzero(node.right.mu))
                assert left | right == set(np.flatnonzero(node.w0 != 0))
                assert not (left & right)
                assert left | right <= sel


def test_winning_feature_absent_downstream(small_data, k64):
    x, y = small_data
    forest = train_reference_forest(x, y, _params(t_max=2, d_max=3), k64[0], seed=3)

    def check(node, banned):
        if node.is_leaf:
            return
        assert node.feature_id not in banned
        check(node.left, banned | {node.feature_id})
        check(node.right, banned | {node.feature_id})

    for tree in forest.trees:
        check(tree, set())


def test_dmax_zero_gives_single_leaves(small_data, k64):
    x, y = small_data
    forest = train_reference_forest(x, y, _params(t_max=2, d_max=0), k64[0], seed=1)
    majority = leaf_weight(y, task=1)
    for tree in forest.trees:
        assert tree.is_leaf
        assert tree.leaf_value == majority
    assert predict_plaintext(forest, x[0], k64[0]) == majority


def test_single_tree_matches_hand_trace(k64):
    # 6 rows, 2 features, both features in play, full subsample, two
    # thresholds per feature: the winner is recomputed here by direct
    # enumeration, independently of the trainer's selection code.
    x = np.array(
        [[1.0, 9.0], [2.0, 8.0], [3.0, 7.0], [10.0, 1.5], [11.0, 2.5], [12.0, 0.5]]
    )
    y = np.array([1.0, 1.0, 1.0, 5.0, 5.0, 5.0])
    params = _params(task=0, t_max=1, d_max=1, varsigma=2, varrho=6, feature_subset_size=2)
    forest = train_reference_forest(x, y, params, k64[0], seed=13)
    root = forest.trees[0]

    best = None
    for f in (0, 1):
        lo, hi = x[:, f].min(), x[:, f].max()
        for i, s in enumerate((lo, hi)):
            w = np.where(x[:, f] <= s, -1, 1)
            score = mse_score(y[w == 1], y[w == -1])
            empties = int((w == 1).sum() == 0) + int((w == -1).sum() == 0)
            key = (empties, score)
            if best is None or key < best[0]:
                best = (key, f, s)
    _key, f_expect, s_expect = best
    assert root.feature_id == f_expect
    assert root.split_scaled == round(s_expect * 10**k64[0].c)
    assert root.left.is_leaf and root.right.is_leaf
    side_low = y[x[:, f_expect] <= s_expect].mean()
    side_high = y[x[:, f_expect] > s_expect].mean()
    assert root.left.leaf_value == pytest.approx(side_low)
    assert root.right.leaf_value == pytest.approx(side_high)


def test_empty_leaf_falls_back_to_parent_weight(k64):
    # A constant feature yields a single all-low split: the high side is
    # empty and its leaf must inherit the parent's weight.
    x = np.array([[4.0], [4.0], [4.0], [4.0]])
    y = np.array([1.0, 2.0, 3.0, 6.0])
    params = _params(task=0, t_max=1, d_max=1, varsigma=3, varrho=4, feature_subset_size=1)
    forest = train_reference_forest(x, y, params, k64[0], seed=2)
    root = forest.trees[0]
    assert not root.is_leaf
    assert root.right.is_leaf and root.right.mu.sum() == 0
    assert root.right.leaf_value == pytest.approx(y.mean())
    assert root.left.leaf_value == pytest.approx(y.mean())


def test_walk_routes_strictly_below_left(k64):
    params = k64[0]
    scale = 10**params.c
    left = TreeNode(depth=2, mu=np.ones(1, np.uint8), leaf_value=-1.0)
    right = TreeNode(depth=2, mu=np.ones(1, np.uint8), leaf_value=1.0)
    root = TreeNode(
        depth=1, mu=np.ones(1, np.uint8), split_scaled=5 * scale, feature_id=0,
        left=left, right=right,
    )
    assert walk_plaintext(root, np.array([4.999]), params) == -1.0
    assert walk_plaintext(root, np.array([5.0]), params) == 1.0  # tie goes right
    assert walk_plaintext(root, np.array([5.001]), params) == 1.0


def test_bagging_thins_root_selection(small_data, k64):
    x, y = small_data
    fp = _params(t_max=2, d_max=2, bagging_fraction=0.5)
    forest = train_reference_forest(x, y, fp, k64[0], seed=4)
    for tree in forest.trees:
        assert tree.mu.sum() == round(0.5 * len(y))
    other = train_reference_forest(x, y, fp, k64[0], seed=4)
    assert all(
        np.array_equal(a.mu, b.mu) for a, b in zip(forest.trees, other.trees)
    )
