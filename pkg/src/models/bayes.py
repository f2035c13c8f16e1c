"""Gaussian naive Bayes."""
from typing import Any, Dict

import numpy as np
from scipy.special import logsumexp

from src.core.types import N_CLASSES
from src.models.base import Estimator, present_classes

class GaussianNB(Estimator):
    """Per-class feature means, floored variances and empirical priors."""

    def __init__(self, var_floor: float = 1e-9):
        self.var_floor = var_floor
        self.means = np.zeros((N_CLASSES, 0))
        self.variances = np.ones((N_CLASSES, 0))
        self.priors = np.zeros(N_CLASSES)

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "GaussianNB":
        X = np.asarray(X, dtype=float)
        d = X.shape[1]
        epsilon = self.var_floor * float(np.max(np.var(X, axis=0))) if X.size else 0.0
        self.means = np.zeros((N_CLASSES, d))
        self.variances = np.ones((N_CLASSES, d))
        self.priors = np.zeros(N_CLASSES)
        for c in present_classes(y):
            rows = X[y == c]
            self.means[c] = rows.mean(axis=0)
            self.variances[c] = rows.var(axis=0) + epsilon
            self.priors[c] = rows.shape[0] / X.shape[0]
        # A fully constant training matrix leaves epsilon at zero.
        self.variances[self.variances <= 0] = np.finfo(float).tiny
        return self

    def log_joint(self, X: np.ndarray) -> np.ndarray:
        """log p(c) + sum_j log N(x_j | mu_cj, var_cj); -inf for absent classes."""
        X = np.asarray(X, dtype=float)
        out = np.full((X.shape[0], N_CLASSES), -np.inf)
        for c in np.flatnonzero(self.priors > 0):
            var = self.variances[c]
            log_norm = -0.5 * np.sum(np.log(2.0 * np.pi * var))
            quad = -0.5 * np.sum((X - self.means[c]) ** 2 / var, axis=1)
            out[:, c] = np.log(self.priors[c]) + log_norm + quad
        return out

    def scores(self, X: np.ndarray) -> np.ndarray:
        return self.log_joint(X)

    def posterior(self, X: np.ndarray) -> np.ndarray:
        joint = self.log_joint(X)
        return np.exp(joint - logsumexp(joint, axis=1, keepdims=True))

    def to_params(self) -> Dict[str, Any]:
        return {
            "var_floor": self.var_floor,
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "priors": self.priors.tolist(),
        }

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "GaussianNB":
        model = cls(var_floor=params["var_floor"])
        model.means = np.asarray(params["means"], dtype=float)
        model.variances = np.asarray(params["variances"], dtype=float)
        model.priors = np.asarray(params["priors"], dtype=float)
        return model
