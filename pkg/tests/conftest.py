"""Shared fixtures: small configurations, feature-matrix builders, stub models."""
from pathlib import Path
from typing import Any, Dict, Sequence

import numpy as np
import pytest

from src.config.settings import PipelineConfig
from src.core.types import FeatureMatrix
from src.models.base import Estimator, ModelVariant
from src.models.training import Model

def make_matrix(rows: np.ndarray, labels: Sequence[int], names: Sequence[str] | None = None) -> FeatureMatrix:
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 1:
        rows = rows.reshape(-1, 1)
    names = tuple(names) if names is not None else tuple(f"F{j}" for j in range(rows.shape[1]))
    return FeatureMatrix(rows=rows, labels=np.asarray(labels, dtype=int), feature_names=names)

class ConstantEstimator(Estimator):
    """Always predicts one class; ignores every feature."""

    def __init__(self, label: int = 0):
        self.label = label

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "ConstantEstimator":
        return self

    def scores(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros((X.shape[0], 5))
        out[:, self.label] = 1.0
        return out

    def to_params(self) -> Dict[str, Any]:
        return {"label": self.label}

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "ConstantEstimator":
        return cls(params["label"])

def constant_model(names: Sequence[str], label: int = 0) -> Model:
    return Model(variant=ModelVariant.DECISION_TREE, estimator=ConstantEstimator(label), feature_names=tuple(names))

@pytest.fixture
def small_config(tmp_path: Path) -> PipelineConfig:
    """Five classes x 4 trials x 2 copies with a short filter and a small forest."""
    config = PipelineConfig.from_dict(
        {
            "master_seed": 7,
            "dataset": {"trials_per_class": 4},
            "noise": {"copies": 2},
            "wavelet": {"order": 8},
            "models": {"hyperparams": {"forest_n_trees": 10}},
            "evaluation": {"n_trials": 2, "importance_repeats": 3},
            "sweep": {"levels": 3},
            "io": {"out_dir": str(tmp_path / "run")},
        }
    )
    config.validate()
    return config

@pytest.fixture
def blobs() -> FeatureMatrix:
    """Two well separated 2-D Gaussian blobs labelled Baseline and CC."""
    rng = np.random.default_rng(0)
    a = rng.normal([-3.0, -3.0], 0.5, size=(60, 2))
    b = rng.normal([3.0, 3.0], 0.5, size=(60, 2))
    return make_matrix(np.vstack([a, b]), [0] * 60 + [1] * 60, ["X", "Y"])

def point_symmetric_xor(seed: int, per_blob: int = 100) -> FeatureMatrix:
    """Four blobs at (+-2, +-2), class = sign of x*y, mirrored through the origin.

    Every row x has a partner -x with the same label, so the best linear
    hinge or logistic fit is w = 0.
    """
    rng = np.random.default_rng(seed)
    half = per_blob // 2
    upper = rng.normal([2.0, 2.0], 0.5, size=(half, 2))
    lower = rng.normal([2.0, -2.0], 0.5, size=(half, 2))
    rows = np.vstack([upper, -upper, lower, -lower])
    labels = [0] * (2 * half) + [1] * (2 * half)
    return make_matrix(rows, labels, ["X", "Y"])

@pytest.fixture
def xor_matrix() -> FeatureMatrix:
    return point_symmetric_xor(1)
