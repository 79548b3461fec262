"""Gradient boosting on logistic loss with depth-limited regression trees.

Round r fits a tree to the loss gradient (label minus predicted
probability) by variance reduction and assigns each leaf a Newton step
sum(g) / sum(p(1-p)); the raw score starts at the training base-rate
log-odds and accumulates learning_rate times each tree's output.  Zero
rounds therefore degenerate to the majority-class predictor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from opentrend.learners.base import register_family, sigmoid
from opentrend.learners.trees import TreeArrays, grow_tree, make_sse_finder

_HESSIAN_FLOOR = 1e-12


@dataclass(eq=False)
class BoostedTreesState:
    kind = "boosted_trees"
    base_score: float
    learning_rate: float
    trees: list[TreeArrays]

    def raw(self, X: np.ndarray) -> np.ndarray:
        z = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            z += self.learning_rate * tree.apply(X)
        return z

    def score(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.raw(X))

    def to_dict(self) -> dict:
        return {
            "base_score": self.base_score,
            "learning_rate": self.learning_rate,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoostedTreesState":
        return cls(
            base_score=float(d["base_score"]),
            learning_rate=float(d["learning_rate"]),
            trees=[TreeArrays.from_dict(t) for t in d["trees"]],
        )


def _fit_boosted_trees(X: np.ndarray, y: np.ndarray, hyper: dict, seed: int) -> BoostedTreesState:
    base_rate = float(y.mean())
    base_score = float(np.log(base_rate / (1.0 - base_rate)))  # single-class y never reaches here
    z = np.full(X.shape[0], base_score)
    lr = float(hyper["learning_rate"])
    trees: list[TreeArrays] = []
    for _ in range(hyper["iterations"]):
        p = sigmoid(z)
        gradient = y - p
        hessian = p * (1.0 - p)

        def leaf_value(idx: np.ndarray) -> float:
            return float(gradient[idx].sum() / (hessian[idx].sum() + _HESSIAN_FLOOR))

        tree = grow_tree(
            X,
            max_depth=hyper["max_depth"],
            max_features=None,
            rng=None,
            find_split=make_sse_finder(X, gradient),
            leaf_value=leaf_value,
            is_pure=lambda idx: bool(np.ptp(gradient[idx]) == 0.0),
        )
        trees.append(tree)
        z = z + lr * tree.apply(X)
    return BoostedTreesState(base_score=base_score, learning_rate=lr, trees=trees)


def _positive_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v >= 1


register_family(
    "GradientBoostedTrees",
    _fit_boosted_trees,
    defaults={"iterations": 100, "max_depth": 6, "learning_rate": 0.3},
    validators={
        "iterations": lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 0,
        "max_depth": _positive_int,
        "learning_rate": lambda v: isinstance(v, (int, float)) and 0 < v <= 10,
    },
    state_cls=BoostedTreesState,
)
