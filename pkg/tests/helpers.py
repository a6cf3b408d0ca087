"""Assertions shared by the federation and acceptance tests."""

import numpy as np

from revfrf.forest.tree import Forest, TreeNode


def assert_nodes_identical(a: TreeNode, b: TreeNode, path="root"):
    assert a.is_leaf == b.is_leaf, "%s: leaf/internal mismatch" % path
    assert a.depth == b.depth, "%s: depth" % path
    if a.is_leaf:
        assert a.leaf_value == b.leaf_value, "%s: leaf value" % path
        return
    assert a.split_scaled == b.split_scaled, "%s: quantized split" % path
    assert a.feature_id == b.feature_id, "%s: feature" % path
    assert a.provider == b.provider, "%s: provider" % path
    assert np.array_equal(a.mu, b.mu), "%s: mu" % path
    assert np.array_equal(a.w0, b.w0), "%s: w0" % path
    assert a.remaining_features == b.remaining_features, "%s: remaining" % path
    assert_nodes_identical(a.left, b.left, path + "/L")
    assert_nodes_identical(a.right, b.right, path + "/R")


def assert_forests_identical(a: Forest, b: Forest):
    assert len(a.trees) == len(b.trees)
    for i, (ta, tb) in enumerate(zip(a.trees, b.trees)):
        assert_nodes_identical(ta, tb, "tree%d" % i)


def path_length(node: TreeNode, x, params) -> int:
    """Internal nodes visited by a plaintext walk of one tree."""
    from revfrf.crypto.fixedpoint import fixed_encode, to_signed

    steps = 0
    while not node.is_leaf:
        steps += 1
        xs = to_signed(fixed_encode(float(x[node.feature_id]), params), params)
        node = node.left if xs < node.split_scaled else node.right
    return steps
