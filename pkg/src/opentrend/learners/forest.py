"""Extremely-randomized tree ensemble (random-threshold splits, no bootstrap).

Every tree sees the whole training set; randomness enters only through the
candidate-column draw and the uniform threshold per candidate.  Tree t is
grown from a generator seeded with (spec seed, t), so the forest is
reproducible and could be built in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from opentrend.learners.base import register_family
from opentrend.learners.trees import (
    TreeArrays,
    _UNBOUNDED_DEPTH,
    grow_tree,
    make_gini_finder,
    make_random_entropy_finder,
)


@dataclass(eq=False)
class ExtraTreesState:
    kind = "extra_trees"
    trees: list[TreeArrays]

    def score(self, X: np.ndarray) -> np.ndarray:
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.apply(X)
        return total / len(self.trees)

    def to_dict(self) -> dict:
        return {"trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d: dict) -> "ExtraTreesState":
        return cls(trees=[TreeArrays.from_dict(t) for t in d["trees"]])


def _fit_extra_trees(X: np.ndarray, y: np.ndarray, hyper: dict, seed: int) -> ExtraTreesState:
    n_features = X.shape[1]
    max_features = max(1, int(math.sqrt(n_features) + 0.5))
    trees = []
    for t in range(hyper["n_trees"]):
        rng = np.random.default_rng([seed, t])
        if hyper["criterion"] == "entropy":
            finder = make_random_entropy_finder(X, y, rng)
        else:
            finder = make_gini_finder(X, y)
        trees.append(
            grow_tree(
                X,
                max_depth=_UNBOUNDED_DEPTH,
                max_features=max_features,
                rng=rng,
                find_split=finder,
                leaf_value=lambda idx: float(y[idx].mean()),
                is_pure=lambda idx: bool(np.ptp(y[idx]) == 0.0),
            )
        )
    return ExtraTreesState(trees=trees)


register_family(
    "ExtraTrees",
    _fit_extra_trees,
    defaults={"n_trees": 1000, "criterion": "entropy"},
    validators={
        "n_trees": lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 1,
        "criterion": lambda v: v in ("entropy", "gini"),
    },
    state_cls=ExtraTreesState,
)
