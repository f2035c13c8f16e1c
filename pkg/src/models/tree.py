"""CART classification tree with Gini splits, stored as flat node arrays."""
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.core.types import N_CLASSES
from src.models.base import Estimator, one_hot

LEAF = -1

def gini(counts: np.ndarray) -> np.ndarray:
    """Gini impurity of class-count vectors (last axis = classes)."""
    counts = np.asarray(counts, dtype=float)
    totals = counts.sum(axis=-1, keepdims=True)
    safe = np.where(totals > 0, totals, 1.0)
    return 1.0 - np.sum((counts / safe) ** 2, axis=-1)

def best_split(x: np.ndarray, onehot: np.ndarray, min_leaf: int) -> Optional[Tuple[float, float]]:
    """Lowest weighted child Gini over thresholds of one feature.

    Returns (weighted_gini, threshold) or None when no threshold separates
    the values with ``min_leaf`` rows on each side. Thresholds are midpoints
    between consecutive distinct sorted values.
    """
    n = x.size
    order = np.argsort(x, kind="stable")
    xs = x[order]
    left = np.cumsum(onehot[order], axis=0)[:-1]
    n_left = np.arange(1, n)
    valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n - n_left >= min_leaf)
    if not np.any(valid):
        return None
    right = left[-1] + onehot[order[-1]] - left
    weighted = (n_left * gini(left) + (n - n_left) * gini(right)) / n
    weighted = np.where(valid, weighted, np.inf)
    i = int(np.argmin(weighted))
    threshold = 0.5 * (xs[i] + xs[i + 1])
    # Midpoint can round up to xs[i + 1] for adjacent floats.
    if threshold >= xs[i + 1]:
        threshold = xs[i]
    return float(weighted[i]), float(threshold)

class DecisionTree(Estimator):
    """Gini CART grown to purity or ``max_depth``.

    With ``max_features`` below the feature count, each node evaluates a
    random subset in random order and keeps drawing further features until
    one admits a split; otherwise features are scanned in column order and
    the generator is not used.
    """

    def __init__(self, max_depth: Optional[int] = None, min_leaf: int = 1, max_features: Optional[int] = None):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.n_features = 0
        self.feature = np.zeros(0, dtype=int)
        self.threshold = np.zeros(0)
        self.left = np.zeros(0, dtype=int)
        self.right = np.zeros(0, dtype=int)
        self.counts = np.zeros((0, N_CLASSES), dtype=int)

    def _candidate_order(self, rng: np.random.Generator) -> np.ndarray:
        if self.max_features is None or self.max_features >= self.n_features:
            return np.arange(self.n_features)
        return rng.permutation(self.n_features)

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "DecisionTree":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.n_features = X.shape[1]
        onehot = one_hot(y)
        k = self.n_features if self.max_features is None else min(self.max_features, self.n_features)

        feature: List[int] = []
        threshold: List[float] = []
        left: List[int] = []
        right: List[int] = []
        counts: List[np.ndarray] = []

        def new_node(rows: np.ndarray) -> int:
            feature.append(LEAF)
            threshold.append(0.0)
            left.append(LEAF)
            right.append(LEAF)
            counts.append(onehot[rows].sum(axis=0).astype(int))
            return len(feature) - 1

        stack = [(new_node(np.arange(y.size)), np.arange(y.size), 0)]
        while stack:
            node, rows, depth = stack.pop()
            node_counts = counts[node]
            if np.count_nonzero(node_counts) <= 1:
                continue
            if self.max_depth is not None and depth >= self.max_depth:
                continue
            if rows.size < 2 * self.min_leaf:
                continue

            best: Optional[Tuple[float, int, float]] = None
            for evaluated, j in enumerate(self._candidate_order(rng)):
                if evaluated >= k and best is not None:
                    break
                split = best_split(X[rows, j], onehot[rows], self.min_leaf)
                if split is not None and (best is None or split[0] < best[0]):
                    best = (split[0], int(j), split[1])
            if best is None:
                continue

            _, j, thr = best
            go_left = X[rows, j] <= thr
            feature[node] = j
            threshold[node] = thr
            left_rows, right_rows = rows[go_left], rows[~go_left]
            left[node] = new_node(left_rows)
            right[node] = new_node(right_rows)
            stack.append((right[node], right_rows, depth + 1))
            stack.append((left[node], left_rows, depth + 1))

        self.feature = np.array(feature, dtype=int)
        self.threshold = np.array(threshold, dtype=float)
        self.left = np.array(left, dtype=int)
        self.right = np.array(right, dtype=int)
        self.counts = np.array(counts, dtype=int).reshape(-1, N_CLASSES)
        return self

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row."""
        X = np.asarray(X, dtype=float)
        nodes = np.zeros(X.shape[0], dtype=int)
        active = self.feature[nodes] != LEAF
        while np.any(active):
            idx = np.flatnonzero(active)
            cur = nodes[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold[cur]
            nodes[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active = self.feature[nodes] != LEAF
        return nodes

    def scores(self, X: np.ndarray) -> np.ndarray:
        return self.counts[self.apply(X)].astype(float)

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    @property
    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=int)
        for node in range(self.n_nodes):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max()) if depths.size else 0

    def to_params(self) -> Dict[str, Any]:
        return {
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "max_features": self.max_features,
            "n_features": self.n_features,
            "nodes": {
                "feature": self.feature.tolist(),
                "threshold": self.threshold.tolist(),
                "left": self.left.tolist(),
                "right": self.right.tolist(),
                "counts": self.counts.tolist(),
            },
        }

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "DecisionTree":
        model = cls(max_depth=params["max_depth"], min_leaf=params["min_leaf"], max_features=params["max_features"])
        model.n_features = int(params["n_features"])
        nodes = params["nodes"]
        model.feature = np.asarray(nodes["feature"], dtype=int)
        model.threshold = np.asarray(nodes["threshold"], dtype=float)
        model.left = np.asarray(nodes["left"], dtype=int)
        model.right = np.asarray(nodes["right"], dtype=int)
        model.counts = np.asarray(nodes["counts"], dtype=int).reshape(-1, N_CLASSES)
        return model
