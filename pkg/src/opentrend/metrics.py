"""Binary classification metrics and the effectiveness rule.

Accuracy and the Matthews correlation coefficient over a confusion matrix;
a (market, task, feature set, classifier) cell counts as *effective* when
accuracy >= 0.8 and MCC >= 0.65 (both thresholds overridable in run
configuration).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ACC_THRESHOLD = 0.8
MCC_THRESHOLD = 0.65


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with class 1 as the positive class."""

    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")
        if self.total == 0:
            raise ValueError("confusion matrix is empty")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(y_true, y_pred) -> ConfusionMatrix:
    """Tally a confusion matrix from aligned 0/1 vectors."""
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    if t.shape != p.shape or t.ndim != 1:
        raise ValueError(f"label vectors must be 1-D and aligned, got {t.shape} vs {p.shape}")
    if t.size == 0:
        raise ValueError("cannot evaluate zero predictions")
    for name, v in (("y_true", t), ("y_pred", p)):
        if not np.all((v == 0) | (v == 1)):
            raise ValueError(f"{name} must contain only 0/1")
    return ConfusionMatrix(
        tp=int(np.sum((t == 1) & (p == 1))),
        tn=int(np.sum((t == 0) & (p == 0))),
        fp=int(np.sum((t == 0) & (p == 1))),
        fn=int(np.sum((t == 1) & (p == 0))),
    )


def accuracy(cm: ConfusionMatrix) -> float:
    """(TP + TN) / total."""
    return (cm.tp + cm.tn) / cm.total


def mcc(cm: ConfusionMatrix) -> float:
    """Matthews correlation coefficient; 0 when any marginal is empty.

    (TP*TN - FP*FN) / sqrt((TP+FP)(TP+FN)(TN+FP)(TN+FN)), computed in exact
    integer arithmetic before the final division.
    """
    denom_sq = (cm.tp + cm.fp) * (cm.tp + cm.fn) * (cm.tn + cm.fp) * (cm.tn + cm.fn)
    if denom_sq == 0:
        return 0.0
    return (cm.tp * cm.tn - cm.fp * cm.fn) / math.sqrt(denom_sq)


@dataclass(frozen=True)
class EvalRecord:
    """One grid cell's outcome in a results bundle."""

    market: str
    task: str
    feature_set: str
    classifier: str
    accuracy: float
    mcc: float
    n_train: int
    n_test: int
    effective: bool

    @classmethod
    def from_confusion(
        cls,
        cm: ConfusionMatrix,
        *,
        market: str,
        task: str,
        feature_set: str,
        classifier: str,
        n_train: int,
        acc_threshold: float = ACC_THRESHOLD,
        mcc_threshold: float = MCC_THRESHOLD,
    ) -> "EvalRecord":
        acc = accuracy(cm)
        m = mcc(cm)
        return cls(
            market=market,
            task=task,
            feature_set=feature_set,
            classifier=classifier,
            accuracy=acc,
            mcc=m,
            n_train=n_train,
            n_test=cm.total,
            effective=bool(acc >= acc_threshold and m >= mcc_threshold),
        )
