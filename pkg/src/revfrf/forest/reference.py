"""Centralized reference trainer: the equivalence oracle.

Trains a forest on the assembled plaintext dataset while drawing from the
same derived random streams the federated protocol uses (one stream per
node for the feature subset, one per node and feature for the row
subsample).  Under a shared master seed the resulting forest is
structurally identical to the federated one -- same features, same
subsamples, same winners, same quantized thresholds -- which is what the
federated-equals-centralized tests assert.
"""

from __future__ import annotations

import numpy as np

from revfrf.errors import ValidationError
from revfrf.seeding import derive_rng
from revfrf.crypto.fixedpoint import fixed_encode, to_signed
from revfrf.crypto.keys import PublicParams
from revfrf.forest.scoring import select_best_split
from revfrf.forest.splits import recommend_splits, sample_feature_subset
from revfrf.forest.tree import Forest, ForestParams, TreeNode, leaf_weight

__all__ = ["train_reference_forest", "root_selection"]


def root_selection(
    n_rows: int,
    fparams: ForestParams,
    seed: int,
    tree_idx: int,
    base_mask: np.ndarray | None = None,
) -> np.ndarray:
    """Root sample-selection vector for one tree.

    Starts from ``base_mask`` (e.g. the train split; all rows when absent)
    and optionally thins it to a per-tree row subsample when bagging is
    enabled.
    """
    if base_mask is None:
        mu = np.ones(n_rows, dtype=np.uint8)
    else:
        mu = np.asarray(base_mask, dtype=np.uint8).copy()
    if fparams.bagging_fraction is not None:
        pool = [int(i) for i in np.flatnonzero(mu)]
        take = max(1, round(fparams.bagging_fraction * len(pool)))
        rng = derive_rng(seed, "bag", tree_idx)
        mu = np.zeros(n_rows, dtype=np.uint8)
        mu[sorted(rng.sample(pool, take))] = 1
    return mu


def train_reference_forest(
    x: np.ndarray,
    y: np.ndarray,
    fparams: ForestParams,
    crypto_params: PublicParams,
    seed: int,
    owner_of: dict[int, int] | None = None,
    train_mask: np.ndarray | None = None,
) -> Forest:
    """Train the plaintext oracle forest.

    Args:
        x: row-major feature matrix.
        y: labels (floats for regression, ints for classification).
        fparams: forest hyperparameters; ``t_max`` trees are grown.
        crypto_params: supplies the fixed-point quantization applied to
            stored thresholds, mirroring what encryption would round to.
        seed: master seed shared with the federated run being mirrored.
        owner_of: feature id -> owning participant id; defaults to the
            identity, and fixes both the provider labels and the candidate
            iteration order.
        train_mask: 0/1 row mask restricting training to a split.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValidationError("training data must be a non-empty 2-D matrix")
    if len(y) != x.shape[0]:
        raise ValidationError("label count does not match row count")
    if owner_of is None:
        owner_of = {f: f for f in range(x.shape[1])}

    fparams = ForestParams(**{**fparams.__dict__, "n_features": x.shape[1]})
    task = fparams.task
    all_features = tuple(range(x.shape[1]))
    global_weight = leaf_weight(y, task)

    def expand(tree_idx: int, path: str, mu: np.ndarray, features: tuple[int, ...],
               depth: int, parent_weight) -> TreeNode:
        has_rows = bool(mu.any())
        weight = leaf_weight(y[mu == 1], task) if has_rows else parent_weight
        if depth > fparams.d_max or not features or not has_rows:
            return TreeNode(depth=depth, mu=mu, leaf_value=weight)

        subset = sample_feature_subset(
            features, derive_rng(seed, "fsub", tree_idx, path), fparams.feature_subset_size
        )
        ordered = sorted(subset, key=lambda f: (owner_of[f], f))
        candidates = []
        thresholds: dict[int, tuple[float, ...]] = {}
        for f in ordered:
            cand, vectors = recommend_splits(
                x[:, f], mu, fparams.varrho, fparams.varsigma,
                derive_rng(seed, "subs", tree_idx, path, f), f,
            )
            thresholds[f] = cand.thresholds
            for i, w in enumerate(vectors):
                candidates.append((owner_of[f], f, i, w))

        best = select_best_split(candidates, y, task)
        if best is None:
            return TreeNode(depth=depth, mu=mu, leaf_value=weight)

        raw_threshold = thresholds[best.feature_id][best.index]
        scaled = to_signed(fixed_encode(raw_threshold, crypto_params), crypto_params)
        remaining = tuple(f for f in features if f != best.feature_id)
        node = TreeNode(
            depth=depth,
            mu=mu,
            split_scaled=scaled,
            feature_id=best.feature_id,
            provider=best.participant,
            w0=best.w,
            remaining_features=remaining,
        )
        node.left = expand(tree_idx, path + "L", (best.w == -1).astype(np.uint8),
                           remaining, depth + 1, weight)
        node.right = expand(tree_idx, path + "R", (best.w == 1).astype(np.uint8),
                            remaining, depth + 1, weight)
        return node

    trees = []
    for t in range(fparams.t_max):
        mu0 = root_selection(len(y), fparams, seed, t, train_mask)
        trees.append(expand(t, "", mu0, all_features, 1, global_weight))
    return Forest(params=fparams, trees=trees)
