"""Evaluation metrics.

Classification: accuracy, recall rate and F1 from the confusion counts;
binary tasks treat the larger class id as positive, multiclass tasks
macro-average recall and F1 one-vs-rest (the confusion-count formulas are
inherently binary).  Regression: MSE, MAE and two R2 variants -- the
default divides by the spread around the *mean prediction* and the
``r2_standard`` field carries the conventional form around the mean truth.
Degenerate denominators yield 0 by convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from revfrf.errors import ValidationError
from revfrf.forest.scoring import TASK_CLASSIFICATION, TASK_REGRESSION

__all__ = ["MetricsReport", "compute_metrics"]


@dataclass(frozen=True)
class MetricsReport:
    task: int
    acc: float | None = None
    rr: float | None = None
    f1: float | None = None
    mse: float | None = None
    mae: float | None = None
    r2: float | None = None
    r2_standard: float | None = None

    def rows(self, standard_r2: bool = False) -> list[tuple[str, float]]:
        """(metric, value) rows for report files.

        ``standard_r2`` swaps which R2 definition is labeled "R2"; both
        variants are always present.
        """
        if self.task == TASK_CLASSIFICATION:
            return [("ACC", self.acc), ("RR", self.rr), ("F1", self.f1)]
        first, second = (self.r2_standard, self.r2) if standard_r2 else (self.r2, self.r2_standard)
        return [
            ("MSE", self.mse),
            ("MAE", self.mae),
            ("R2", first),
            ("R2_alt", second),
        ]


def _binary_counts(preds: np.ndarray, truths: np.ndarray, positive: int) -> tuple[int, int, int, int]:
    tp = int(np.sum((preds == positive) & (truths == positive)))
    tn = int(np.sum((preds != positive) & (truths != positive)))
    fp = int(np.sum((preds == positive) & (truths != positive)))
    fn = int(np.sum((preds != positive) & (truths == positive)))
    return tp, tn, fp, fn


def compute_metrics(
    predictions: Sequence[float], truths: Sequence[float], task: int
) -> MetricsReport:
    preds = np.asarray(predictions)
    truths = np.asarray(truths)
    if len(preds) != len(truths):
        raise ValidationError("prediction and truth lengths differ")
    if len(preds) == 0:
        raise ValidationError("cannot compute metrics on empty vectors")

    if task == TASK_CLASSIFICATION:
        preds = preds.astype(int)
        truths = truths.astype(int)
        classes = sorted(set(preds.tolist()) | set(truths.tolist()))
        acc = float(np.mean(preds == truths))
        if len(classes) <= 2:
            positive = classes[-1]
            tp, tn, fp, fn = _binary_counts(preds, truths, positive)
            rr = tp / (tp + fn) if tp + fn else 0.0
            f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
        else:
            rrs, f1s = [], []
            for cls in classes:
                tp, tn, fp, fn = _binary_counts(preds, truths, cls)
                rrs.append(tp / (tp + fn) if tp + fn else 0.0)
                f1s.append(2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0)
            rr = float(np.mean(rrs))
            f1 = float(np.mean(f1s))
        return MetricsReport(task=task, acc=acc, rr=float(rr), f1=float(f1))

    if task != TASK_REGRESSION:
        raise ValidationError("unknown task %r" % task)
    preds = preds.astype(float)
    truths = truths.astype(float)
    err = truths - preds
    mse = float(np.mean(err**2))
    mae = float(np.mean(np.abs(err)))
    sse = float(np.sum(err**2))
    denom_printed = float(np.sum((preds.mean() - preds) ** 2))
    denom_standard = float(np.sum((truths - truths.mean()) ** 2))
    r2 = 1.0 - sse / denom_printed if denom_printed > 0 else 0.0
    r2_std = 1.0 - sse / denom_standard if denom_standard > 0 else 0.0
    return MetricsReport(task=task, mse=mse, mae=mae, r2=r2, r2_standard=r2_std)
