"""Linear classifiers: one-vs-rest logistic regression and one-vs-one linear SVM."""
from itertools import combinations
from typing import Any, Dict, List, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from src.core.types import N_CLASSES
from src.models.base import Estimator, present_classes
from src.utils.exceptions import ConvergenceError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

def _with_bias(X: np.ndarray) -> np.ndarray:
    return np.column_stack([np.asarray(X, dtype=float), np.ones(X.shape[0])])

class LogisticOvR(Estimator):
    """One binary cross-entropy model per present class, L2-penalized (bias excluded)."""

    def __init__(self, l2: float = 1e-4, max_iter: int = 2000, tol: float = 1e-6):
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.weights = np.zeros((N_CLASSES, 0))
        self.classes = np.zeros(0, dtype=int)

    def _fit_binary(self, Xb: np.ndarray, target: np.ndarray) -> np.ndarray:
        n, p = Xb.shape
        penalty_mask = np.ones(p)
        penalty_mask[-1] = 0.0

        def objective(w: np.ndarray) -> Tuple[float, np.ndarray]:
            z = Xb @ w
            loss = np.mean(np.logaddexp(0.0, z) - target * z) + 0.5 * self.l2 * np.sum((w * penalty_mask) ** 2)
            grad = Xb.T @ (expit(z) - target) / n + self.l2 * w * penalty_mask
            return float(loss), grad

        result = minimize(
            objective,
            np.zeros(p),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": self.max_iter, "gtol": self.tol},
        )
        if result.nit >= self.max_iter and not result.success:
            raise ConvergenceError("logistic regression did not reach tolerance", iterations=int(result.nit))
        logger.debug(f"Logistic binary fit: {result.nit} iterations, loss {result.fun:.3e}")
        return result.x

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "LogisticOvR":
        Xb = _with_bias(X)
        self.classes = present_classes(y)
        self.weights = np.zeros((N_CLASSES, Xb.shape[1]))
        for c in self.classes:
            self.weights[c] = self._fit_binary(Xb, (y == c).astype(float))
        return self

    def scores(self, X: np.ndarray) -> np.ndarray:
        logits = _with_bias(X) @ self.weights.T
        absent = np.setdiff1d(np.arange(N_CLASSES), self.classes)
        logits[:, absent] = -np.inf
        return logits

    def to_params(self) -> Dict[str, Any]:
        return {
            "l2": self.l2,
            "max_iter": self.max_iter,
            "tol": self.tol,
            "classes": self.classes.tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "LogisticOvR":
        model = cls(l2=params["l2"], max_iter=params["max_iter"], tol=params["tol"])
        model.classes = np.asarray(params["classes"], dtype=int)
        model.weights = np.asarray(params["weights"], dtype=float)
        return model

class LinearSvmOvO(Estimator):
    """Pairwise hinge-loss classifiers trained by projected subgradient descent.

    Objective per pair: lambda/2 ||w||^2 + mean hinge, lambda = 1/(C n).
    Step sizes 1/(lambda t); the returned weights average the second half
    of the iterates.
    """

    def __init__(self, c: float = 1.0, max_iter: int = 1000):
        self.c = c
        self.max_iter = max_iter
        self.pairs: List[Tuple[int, int]] = []
        self.weights = np.zeros((0, 0))

    def _fit_pair(self, Xb: np.ndarray, target: np.ndarray) -> np.ndarray:
        n, p = Xb.shape
        lam = 1.0 / (self.c * n)
        radius = 1.0 / np.sqrt(lam)
        w = np.zeros(p)
        average = np.zeros(p)
        start = self.max_iter // 2
        for t in range(1, self.max_iter + 1):
            margins = target * (Xb @ w)
            active = margins < 1.0
            subgrad = lam * w - (target[active] @ Xb[active]) / n
            w = w - subgrad / (lam * t)
            norm = np.linalg.norm(w)
            if norm > radius:
                w *= radius / norm
            if t > start:
                average += w
        return average / (self.max_iter - start)

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "LinearSvmOvO":
        Xb = _with_bias(X)
        self.pairs = list(combinations(present_classes(y).tolist(), 2))
        self.weights = np.zeros((len(self.pairs), Xb.shape[1]))
        for k, (a, b) in enumerate(self.pairs):
            mask = (y == a) | (y == b)
            target = np.where(y[mask] == a, 1.0, -1.0)
            self.weights[k] = self._fit_pair(Xb[mask], target)
        return self

    def scores(self, X: np.ndarray) -> np.ndarray:
        votes = np.full((X.shape[0], N_CLASSES), -np.inf)
        present = sorted({c for pair in self.pairs for c in pair})
        votes[:, present] = 0.0
        if not self.pairs:
            return votes
        decisions = _with_bias(X) @ self.weights.T
        for k, (a, b) in enumerate(self.pairs):
            wins_a = decisions[:, k] > 0
            votes[wins_a, a] += 1
            votes[~wins_a, b] += 1
        return votes

    def to_params(self) -> Dict[str, Any]:
        return {
            "c": self.c,
            "max_iter": self.max_iter,
            "pairs": [list(p) for p in self.pairs],
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "LinearSvmOvO":
        model = cls(c=params["c"], max_iter=params["max_iter"])
        model.pairs = [tuple(p) for p in params["pairs"]]
        model.weights = np.asarray(params["weights"], dtype=float)
        return model
