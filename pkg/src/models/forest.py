"""Random forest: bagged Gini trees with per-split feature subsampling."""
from typing import Any, Dict, List, Optional

import numpy as np

from src.core.types import N_CLASSES
from src.models.base import Estimator
from src.models.tree import DecisionTree

class RandomForest(Estimator):
    """Majority vote of ``n_trees`` trees; each tree draws its own child generator."""

    def __init__(
        self,
        n_trees: int = 100,
        max_features: Optional[int] = None,
        bootstrap: bool = True,
        max_depth: Optional[int] = None,
        min_leaf: int = 1,
    ):
        self.n_trees = n_trees
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.trees: List[DecisionTree] = []

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "RandomForest":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        n = y.size
        tree_rngs = rng.spawn(self.n_trees)
        self.trees = []
        for tree_rng in tree_rngs:
            rows = tree_rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTree(max_depth=self.max_depth, min_leaf=self.min_leaf, max_features=self.max_features)
            self.trees.append(tree.fit(X[rows], y[rows], tree_rng))
        return self

    def votes(self, X: np.ndarray) -> np.ndarray:
        """(n, N_CLASSES) count of trees predicting each class."""
        votes = np.zeros((X.shape[0], N_CLASSES))
        rows = np.arange(X.shape[0])
        for tree in self.trees:
            votes[rows, tree.predict(X)] += 1
        return votes

    def scores(self, X: np.ndarray) -> np.ndarray:
        return self.votes(X)

    def to_params(self) -> Dict[str, Any]:
        return {
            "n_trees": self.n_trees,
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "trees": [tree.to_params() for tree in self.trees],
        }

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "RandomForest":
        model = cls(
            n_trees=params["n_trees"],
            max_features=params["max_features"],
            bootstrap=params["bootstrap"],
            max_depth=params["max_depth"],
            min_leaf=params["min_leaf"],
        )
        model.trees = [DecisionTree.from_params(p) for p in params["trees"]]
        return model
