"""Random-decision-tree machinery shared by the federation driver and the
centralized reference trainer that serves as its correctness oracle."""

from revfrf.forest.splits import (
    CandidateSplits,
    partition,
    recommend_splits,
    sample_feature_subset,
    sign,
)
from revfrf.forest.scoring import gini_score, mse_score, select_best_split, ScoredCandidate
from revfrf.forest.tree import (
    Forest,
    ForestParams,
    TreeNode,
    aggregate_outputs,
    leaf_weight,
    predict_plaintext,
    walk_plaintext,
)
from revfrf.forest.reference import train_reference_forest
from revfrf.forest.forest_io import load_forest, save_forest

__all__ = [
    "CandidateSplits",
    "partition",
    "recommend_splits",
    "sample_feature_subset",
    "sign",
    "gini_score",
    "mse_score",
    "select_best_split",
    "ScoredCandidate",
    "Forest",
    "ForestParams",
    "TreeNode",
    "aggregate_outputs",
    "leaf_weight",
    "predict_plaintext",
    "walk_plaintext",
    "train_reference_forest",
    "load_forest",
    "save_forest",
]
