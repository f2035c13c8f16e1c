"""Shared model types: variants, hyperparameters, scaler, estimator interface."""
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.core.types import N_CLASSES
from src.utils.exceptions import ConfigurationError

class ModelVariant(Enum):
    LOGISTIC_OVR = "LogisticOvR"
    LINEAR_SVM_OVO = "LinearSvmOvO"
    GAUSSIAN_NB = "GaussianNB"
    DECISION_TREE = "DecisionTree"
    RANDOM_FOREST = "RandomForest"

    @property
    def needs_scaling(self) -> bool:
        return self in (ModelVariant.LOGISTIC_OVR, ModelVariant.LINEAR_SVM_OVO)

    @classmethod
    def parse(cls, value: str) -> "ModelVariant":
        for member in cls:
            if value.lower() in (member.value.lower(), member.name.lower()):
                return member
        raise ConfigurationError(f"unknown model variant '{value}'; expected one of {[m.value for m in cls]}")

ALL_VARIANTS: Tuple[ModelVariant, ...] = tuple(ModelVariant)

@dataclass
class Hyperparams:
    """Training settings for all five variants."""

    logistic_max_iter: int = 2000
    logistic_tol: float = 1e-6
    logistic_l2: float = 1e-4
    svm_c: float = 1.0
    svm_max_iter: int = 1000
    nb_var_floor: float = 1e-9
    tree_max_depth: Optional[int] = None
    tree_min_leaf: int = 1
    forest_n_trees: int = 100
    forest_max_features: Union[str, int] = "sqrt"
    forest_bootstrap: bool = True

    def validate(self) -> None:
        """Validate configuration."""
        if self.logistic_max_iter < 1 or self.svm_max_iter < 1:
            raise ConfigurationError("iteration limits must be >= 1")
        if self.logistic_tol <= 0 or self.logistic_l2 < 0:
            raise ConfigurationError("logistic_tol must be > 0 and logistic_l2 >= 0")
        if self.svm_c <= 0:
            raise ConfigurationError(f"svm_c must be > 0, got {self.svm_c}")
        if self.nb_var_floor < 0:
            raise ConfigurationError("nb_var_floor must be >= 0")
        if self.tree_max_depth is not None and self.tree_max_depth < 1:
            raise ConfigurationError("tree_max_depth must be >= 1 or null")
        if self.tree_min_leaf < 1:
            raise ConfigurationError("tree_min_leaf must be >= 1")
        if self.forest_n_trees < 1:
            raise ConfigurationError("forest_n_trees must be >= 1")
        if isinstance(self.forest_max_features, str):
            if self.forest_max_features not in ("sqrt", "all"):
                raise ConfigurationError("forest_max_features must be 'sqrt', 'all' or a positive integer")
        elif self.forest_max_features < 1:
            raise ConfigurationError("forest_max_features must be >= 1")

    def max_features(self, n_features: int) -> int:
        if self.forest_max_features == "sqrt":
            return max(1, int(np.sqrt(n_features)))
        if self.forest_max_features == "all":
            return n_features
        return min(int(self.forest_max_features), n_features)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

@dataclass(frozen=True)
class Scaler:
    """Per-feature affine standardization captured on training data."""
    mean: np.ndarray
    std: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.std

    def to_params(self) -> Dict[str, Any]:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "Scaler":
        return cls(mean=np.asarray(params["mean"], dtype=float), std=np.asarray(params["std"], dtype=float))

class Estimator(ABC):
    """Numpy classifier over canonical class indices 0..N_CLASSES-1."""

    @abstractmethod
    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "Estimator":
        ...

    @abstractmethod
    def scores(self, X: np.ndarray) -> np.ndarray:
        """(n, N_CLASSES) scores; larger is more likely, absent classes -inf."""

    def predict(self, X: np.ndarray) -> np.ndarray:
        if X.shape[0] == 0:
            return np.zeros(0, dtype=int)
        # argmax returns the first maximum: ties go to the earlier canonical class.
        return np.argmax(self.scores(X), axis=1).astype(int)

    @abstractmethod
    def to_params(self) -> Dict[str, Any]:
        ...

    @classmethod
    @abstractmethod
    def from_params(cls, params: Dict[str, Any]) -> "Estimator":
        ...

def present_classes(y: np.ndarray) -> np.ndarray:
    return np.unique(np.asarray(y, dtype=int))

def one_hot(y: np.ndarray) -> np.ndarray:
    """Integer labels to the (n, N_CLASSES) one-hot label scheme."""
    out = np.zeros((y.size, N_CLASSES))
    out[np.arange(y.size), y] = 1.0
    return out
