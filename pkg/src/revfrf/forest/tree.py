"""Tree and forest data structures plus the plaintext walk.

A node stores everything the revocation protocol needs to rebuild its
subtree from scratch: the sample-selection vector it was expanded with,
the winning split vector, its depth, its provider and the provider's
authentication token, and the feature set that remained after the winning
feature was removed.  The winning threshold itself is held either as a
ciphertext under the provider's key (federated forests) or as a plaintext
quantized value (the reference oracle and escrow-decrypted copies).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from revfrf.errors import ValidationError
from revfrf.crypto.ciphertext import Ciphertext
from revfrf.crypto.keys import PublicParams
from revfrf.forest.scoring import TASK_CLASSIFICATION, TASK_REGRESSION

__all__ = [
    "ForestParams",
    "TreeNode",
    "Forest",
    "leaf_weight",
    "aggregate_outputs",
    "walk_plaintext",
    "predict_plaintext",
]


@dataclass(frozen=True)
class ForestParams:
    """Hyperparameters shared by every tree of a forest."""

    task: int
    t_max: int = 100
    d_max: int = 10
    varsigma: int = 8
    varrho: int = 32
    n_features: int = 0
    feature_subset_size: int | None = None  # None: ceil(sqrt(|F'|))
    bagging_fraction: float | None = None  # None: every tree sees all rows

    def __post_init__(self) -> None:
        if self.task not in (TASK_REGRESSION, TASK_CLASSIFICATION):
            raise ValidationError("task must be 0 (regression) or 1 (classification)")
        if self.t_max < 1 or self.d_max < 0:
            raise ValidationError("t_max must be >= 1 and d_max >= 0")
        if self.varsigma < 1 or self.varrho < 1:
            raise ValidationError("varsigma and varrho must be >= 1")


@dataclass
class TreeNode:
    """One node of a random decision tree.

    Internal nodes carry a split (encrypted and/or plaintext-quantized) and
    a provider; leaves carry only a weight.  The left child holds the rows
    whose feature value was at or below the threshold (split vector -1),
    the right child the rows above it; prediction routes left exactly when
    the request value is strictly below the threshold.
    """

    depth: int
    mu: np.ndarray
    leaf_value: float | int | None = None
    split_ct: Ciphertext | None = None
    split_scaled: int | None = None  # round(threshold * 10^c), signed
    feature_id: int = -1
    provider: int = -1
    auth_token: bytes = b""
    w0: np.ndarray | None = None
    remaining_features: tuple[int, ...] = ()
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    rebuilt: bool = field(default=False, repr=False)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def walk(self) -> Iterator["TreeNode"]:
        """Pre-order traversal of the subtree rooted here."""
        yield self
        if self.left is not None:
            yield from self.left.walk()
        if self.right is not None:
            yield from self.right.walk()

    def internal_count(self) -> int:
        return sum(1 for node in self.walk() if not node.is_leaf)


@dataclass
class Forest:
    """An ensemble of random decision trees plus its hyperparameters."""

    params: ForestParams
    trees: list[TreeNode] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.trees) > self.params.t_max:
            raise ValidationError("forest holds more trees than t_max")

    def internal_count(self) -> int:
        return sum(t.internal_count() for t in self.trees)

    def providers(self) -> set[int]:
        return {n.provider for t in self.trees for n in t.walk() if not n.is_leaf}


def leaf_weight(labels: Sequence[float], task: int) -> float | int:
    """The value a leaf predicts: mean label (regression) or majority
    class with ties broken toward the smallest class id (classification)."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValidationError("leaf weight needs at least one routed sample")
    if task == TASK_REGRESSION:
        return float(labels.mean())
    classes, counts = np.unique(labels.astype(int), return_counts=True)
    return int(classes[int(np.argmax(counts))])


def aggregate_outputs(results: Sequence[float | int], task: int) -> float | int:
    """Combine per-tree outputs: mean for regression, majority vote with
    smallest-class-id tie break for classification."""
    if not results:
        raise ValidationError("cannot aggregate an empty result set")
    if task == TASK_REGRESSION:
        return float(np.mean([float(r) for r in results]))
    votes = Counter(int(r) for r in results)
    top = max(votes.values())
    return min(c for c, v in votes.items() if v == top)


def _scaled(x: float, params: PublicParams) -> int:
    from revfrf.crypto.fixedpoint import fixed_encode, to_signed

    return to_signed(fixed_encode(x, params), params)


def walk_plaintext(node: TreeNode, x: np.ndarray, params: PublicParams) -> float | int:
    """Route one request through a tree using quantized comparisons.

    Comparisons happen in scaled-integer space, mirroring exactly what the
    encrypted walk computes: strictly-below goes left, at-or-above right.
    """
    while not node.is_leaf:
        if node.split_scaled is None:
            raise ValidationError("plaintext walk needs plaintext split values")
        xs = _scaled(float(x[node.feature_id]), params)
        node = node.left if xs < node.split_scaled else node.right  # type: ignore[assignment]
    return node.leaf_value  # type: ignore[return-value]


def predict_plaintext(forest: Forest, x: np.ndarray, params: PublicParams) -> float | int:
    """Aggregate plaintext walks over all trees of a forest."""
    results = [walk_plaintext(t, x, params) for t in forest.trees]
    return aggregate_outputs(results, forest.params.task)
