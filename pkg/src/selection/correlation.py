"""Pearson-correlation filtering of redundant features."""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.core.types import FeatureMatrix
from src.utils.exceptions import ConfigurationError, ConstantFeatureError, DataError, FeatureSelectionError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

ZERO_VARIANCE = "zero variance"
CORRELATED = "correlated"

@dataclass
class SelectionConfig:
    threshold: float = 0.95

    def validate(self) -> None:
        """Validate configuration."""
        if not 0 < self.threshold <= 1:
            raise ConfigurationError(f"selection.threshold must be in (0, 1], got {self.threshold}")

@dataclass(frozen=True)
class CorrelationMatrix:
    values: np.ndarray
    feature_names: Tuple[str, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "feature_names": list(self.feature_names),
            "values": [[None if np.isnan(v) else float(v) for v in row] for row in self.values],
        }

@dataclass(frozen=True)
class DroppedFeature:
    feature: str
    representative: Optional[str]
    abs_rho: Optional[float]
    reason: str

@dataclass
class SelectionReport:
    kept: List[str]
    dropped: List[DroppedFeature]
    threshold: float
    correlation: Optional[CorrelationMatrix] = field(default=None, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        report: Dict[str, Any] = {
            "threshold": self.threshold,
            "kept": list(self.kept),
            "dropped": [
                {"feature": d.feature, "representative": d.representative, "abs_rho": d.abs_rho, "reason": d.reason}
                for d in self.dropped
            ],
        }
        if self.correlation is not None:
            report["correlation"] = self.correlation.to_dict()
        return report

def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Sample correlation coefficient of two equal-length columns."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise DataError(f"pearson needs two equal-length columns of >= 2 values, got {x.shape} and {y.shape}")
    xc = x - np.mean(x)
    yc = y - np.mean(y)
    sxx = float(np.dot(xc, xc))
    syy = float(np.dot(yc, yc))
    if sxx == 0 or syy == 0:
        raise ConstantFeatureError("constant feature: correlation undefined for zero-variance column")
    rho = float(np.dot(xc, yc)) / float(np.sqrt(sxx * syy))
    return float(np.clip(rho, -1.0, 1.0))

def is_constant(column: np.ndarray) -> bool:
    return bool(np.ptp(column) == 0)

def correlation_matrix(fm: FeatureMatrix) -> CorrelationMatrix:
    """Pairwise Pearson matrix; rows/columns of constant features are NaN."""
    d = fm.n_features
    values = np.full((d, d), np.nan)
    constant = [is_constant(fm.rows[:, j]) for j in range(d)]
    for i in range(d):
        if constant[i]:
            continue
        values[i, i] = 1.0
        for j in range(i + 1, d):
            if constant[j]:
                continue
            values[i, j] = values[j, i] = pearson(fm.rows[:, i], fm.rows[:, j])
    return CorrelationMatrix(values=values, feature_names=fm.feature_names)

def filter_features(fm: FeatureMatrix, threshold: float = 0.95) -> Tuple[FeatureMatrix, SelectionReport]:
    """Greedy pass in column order: drop a feature whose |rho| with an earlier kept feature >= threshold."""
    SelectionConfig(threshold).validate()
    if fm.n_rows < 2:
        raise DataError("feature selection needs at least 2 rows")

    corr = correlation_matrix(fm)
    dropped: List[DroppedFeature] = []
    candidates: List[int] = []
    for j, name in enumerate(fm.feature_names):
        if is_constant(fm.rows[:, j]):
            dropped.append(DroppedFeature(name, None, None, ZERO_VARIANCE))
            logger.warning(f"⚠️ Dropping constant feature {name}")
        else:
            candidates.append(j)

    kept: List[int] = []
    for j in candidates:
        representative = next((k for k in kept if abs(corr.values[k, j]) >= threshold), None)
        if representative is None:
            kept.append(j)
        else:
            dropped.append(
                DroppedFeature(
                    feature=fm.feature_names[j],
                    representative=fm.feature_names[representative],
                    abs_rho=float(abs(corr.values[representative, j])),
                    reason=CORRELATED,
                )
            )

    if not kept:
        raise FeatureSelectionError("every feature was dropped; nothing left to classify with")

    kept_names = [fm.feature_names[j] for j in kept]
    report = SelectionReport(kept=kept_names, dropped=dropped, threshold=threshold, correlation=corr)
    logger.info(
        f"✅ Selection at |rho| >= {threshold}: kept {len(kept_names)}/{fm.n_features} {kept_names}"
    )
    return fm.select_columns(kept_names), report
