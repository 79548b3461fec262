"""Accuracy, Matthews correlation, and the effectiveness rule."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opentrend.metrics import (
    ACC_THRESHOLD,
    MCC_THRESHOLD,
    ConfusionMatrix,
    EvalRecord,
    accuracy,
    confusion,
    mcc,
)


def oracle_mcc(tp, tn, fp, fn):
    """Textbook float formula, independent of the integer-exact version."""
    denom = math.sqrt(tp + fp) * math.sqrt(tp + fn) * math.sqrt(tn + fp) * math.sqrt(tn + fn)
    if denom == 0.0:
        return 0.0
    return (tp * tn - fp * fn) / denom


counts = st.integers(min_value=0, max_value=500)
nonempty_cm = st.tuples(counts, counts, counts, counts).filter(lambda t: sum(t) > 0)


class TestConfusion:
    def test_tally(self):
        y_true = np.array([1, 1, 1, 0, 0, 0, 1, 0])
        y_pred = np.array([1, 1, 0, 0, 0, 1, 1, 0])
        cm = confusion(y_true, y_pred)
        assert (cm.tp, cm.tn, cm.fp, cm.fn) == (3, 3, 1, 1)

    def test_rejects_misaligned(self):
        with pytest.raises(ValueError, match="aligned"):
            confusion([1, 0], [1])

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError, match="y_pred must contain only 0/1"):
            confusion([1, 0], [1, 2])

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="zero predictions"):
            confusion([], [])

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            ConfusionMatrix(tp=-1, tn=2, fp=0, fn=0)


class TestKnownValues:
    def test_perfect_predictions(self):
        cm = confusion([1, 0, 1, 0], [1, 0, 1, 0])
        assert accuracy(cm) == 1.0
        assert mcc(cm) == 1.0

    def test_inverted_predictions(self):
        cm = confusion([1, 0, 1, 0], [0, 1, 0, 1])
        assert accuracy(cm) == 0.0
        assert mcc(cm) == -1.0

    def test_hand_computed_cell(self):
        # tp=4 tn=5 fp=1 fn=2: acc = 9/12, mcc = (20-2)/sqrt(5*6*6*7)
        cm = ConfusionMatrix(tp=4, tn=5, fp=1, fn=2)
        assert accuracy(cm) == pytest.approx(0.75)
        assert mcc(cm) == pytest.approx(18.0 / math.sqrt(1260.0), abs=1e-12)

    def test_single_class_truth_gives_zero_mcc(self):
        # all-ones truth: TN+FP marginal is 0, so the coefficient is defined as 0
        cm = confusion([1, 1, 1], [1, 0, 1])
        assert mcc(cm) == 0.0

    def test_constant_predictions_give_zero_mcc(self):
        cm = confusion([1, 0, 1], [1, 1, 1])
        assert mcc(cm) == 0.0

    def test_random_guessing_is_near_zero(self):
        cm = ConfusionMatrix(tp=250, tn=250, fp=250, fn=250)
        assert mcc(cm) == 0.0
        assert accuracy(cm) == 0.5


class TestProperties:
    @given(nonempty_cm)
    def test_matches_float_oracle(self, t):
        tp, tn, fp, fn = t
        cm = ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)
        assert mcc(cm) == pytest.approx(oracle_mcc(tp, tn, fp, fn), abs=1e-9)

    @given(nonempty_cm)
    def test_bounds(self, t):
        tp, tn, fp, fn = t
        cm = ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)
        assert -1.0 <= mcc(cm) <= 1.0
        assert 0.0 <= accuracy(cm) <= 1.0

    @given(nonempty_cm)
    def test_swapping_truth_and_prediction_is_symmetric(self, t):
        tp, tn, fp, fn = t
        # transposing the confusion matrix swaps fp and fn
        a = ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)
        b = ConfusionMatrix(tp=tp, tn=tn, fp=fn, fn=fp)
        assert mcc(a) == pytest.approx(mcc(b), abs=1e-12)
        assert accuracy(a) == accuracy(b)

    @given(nonempty_cm)
    def test_complementing_predictions_negates_mcc(self, t):
        tp, tn, fp, fn = t
        a = ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)
        b = ConfusionMatrix(tp=fn, tn=fp, fp=tn, fn=tp)  # every prediction flipped
        assert mcc(b) == pytest.approx(-mcc(a), abs=1e-12)

    @given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=200))
    def test_confusion_from_vectors_matches_direct_count(self, pairs):
        y_true = [a for a, _ in pairs]
        y_pred = [b for _, b in pairs]
        cm = confusion(y_true, y_pred)
        assert cm.tp == sum(1 for a, b in pairs if a == 1 and b == 1)
        assert cm.tn == sum(1 for a, b in pairs if a == 0 and b == 0)
        assert cm.total == len(pairs)
        assert accuracy(cm) == pytest.approx(sum(1 for a, b in pairs if a == b) / len(pairs))


class TestEffectiveness:
    def make(self, acc_and_cm):
        return acc_and_cm

    def test_both_above_thresholds(self):
        # 81/100 correct and strong agreement: effective
        cm = ConfusionMatrix(tp=41, tn=42, fp=8, fn=9)
        rec = EvalRecord.from_confusion(
            cm, market="m", task="op", feature_set="INT", classifier="dt", n_train=10
        )
        assert rec.accuracy >= ACC_THRESHOLD and rec.mcc >= MCC_THRESHOLD
        assert rec.effective

    def test_high_accuracy_weak_correlation_is_not_effective(self):
        # 85% accuracy on skewed data but mcc well under the bar
        cm = ConfusionMatrix(tp=84, tn=1, fp=9, fn=6)
        rec = EvalRecord.from_confusion(
            cm, market="m", task="op", feature_set="INT", classifier="dt", n_train=10
        )
        assert rec.accuracy >= 0.8
        assert rec.mcc < 0.65
        assert not rec.effective

    def test_threshold_overrides(self):
        cm = ConfusionMatrix(tp=3, tn=3, fp=2, fn=2)  # acc 0.6, mcc 0.2
        loose = EvalRecord.from_confusion(
            cm,
            market="m",
            task="op",
            feature_set="INT",
            classifier="dt",
            n_train=10,
            acc_threshold=0.5,
            mcc_threshold=0.1,
        )
        assert loose.effective
        strict = EvalRecord.from_confusion(
            cm, market="m", task="op", feature_set="INT", classifier="dt", n_train=10
        )
        assert not strict.effective

    def test_record_carries_counts(self):
        cm = ConfusionMatrix(tp=5, tn=5, fp=0, fn=0)
        rec = EvalRecord.from_confusion(
            cm, market="m", task="op", feature_set="INT", classifier="dt", n_train=40
        )
        assert rec.n_train == 40
        assert rec.n_test == 10
