"""Permutation importance on held-out data."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from src.core import rng as streams
from src.core.types import FeatureMatrix
from src.models.training import Model, predict_indices
from src.utils.exceptions import ConfigurationError, DataError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

@dataclass(frozen=True)
class FeatureImportance:
    feature: str
    mean_drop: float
    std_drop: float
    drops: tuple[float, ...] = field(repr=False, default=())

@dataclass
class ImportanceReport:
    """Accuracy drop per feature; values are not normalized and need not sum to anything."""
    entries: List[FeatureImportance]
    baseline_accuracy: float
    repeats: int
    seed: int

    def entry(self, feature: str) -> FeatureImportance:
        for item in self.entries:
            if item.feature == feature:
                return item
        raise KeyError(feature)

    def ranking(self) -> List[str]:
        """Features by decreasing mean drop; ties keep column order."""
        order = sorted(range(len(self.entries)), key=lambda i: -self.entries[i].mean_drop)
        return [self.entries[i].feature for i in order]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "baseline_accuracy": self.baseline_accuracy,
            "repeats": self.repeats,
            "seed": self.seed,
            "features": [
                {"feature": e.feature, "mean_drop": e.mean_drop, "std_drop": e.std_drop} for e in self.entries
            ],
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "feature": [e.feature for e in self.entries],
                "mean_drop": [e.mean_drop for e in self.entries],
                "std_drop": [e.std_drop for e in self.entries],
            }
        )

def _accuracy(model: Model, X: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(predict_indices(model, X) == y))

def permutation_importance(
    model: Model, test: FeatureMatrix, repeats: int = 20, seed: int = 0, workers: int = 1
) -> ImportanceReport:
    """Mean and std of (baseline accuracy - accuracy with one column shuffled).

    Column ``j`` is shuffled ``repeats`` times with its own child stream, so
    results do not depend on ``workers``. The caller's matrix is never modified.
    """
    if repeats < 1:
        raise ConfigurationError(f"repeats must be >= 1, got {repeats}")
    if test.n_rows == 0:
        raise DataError("permutation importance needs a non-empty test matrix")
    if test.feature_names != model.feature_names:
        raise DataError(
            f"test features {list(test.feature_names)} do not match model features {list(model.feature_names)}"
        )

    X = np.array(test.rows, dtype=float)
    y = test.labels
    baseline = _accuracy(model, X, y)

    def column_drops(j: int) -> FeatureImportance:
        rng = streams.child_rng(seed, streams.PERMUTE, j)
        work = X.copy()
        drops = np.empty(repeats)
        for r in range(repeats):
            work[:, j] = rng.permutation(X[:, j])
            drops[r] = baseline - _accuracy(model, work, y)
        return FeatureImportance(
            feature=test.feature_names[j],
            mean_drop=float(drops.mean()),
            std_drop=float(drops.std()),
            drops=tuple(float(d) for d in drops),
        )

    columns = range(test.n_features)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(column_drops, columns))
    else:
        entries = [column_drops(j) for j in columns]

    report = ImportanceReport(entries=entries, baseline_accuracy=baseline, repeats=repeats, seed=seed)
    logger.info(f"✅ Permutation importance over {test.n_features} features; top: {report.ranking()[:3]}")
    return report
