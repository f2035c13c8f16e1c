"""Split, standardize, train, predict, evaluate and repeated-split trials."""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.core import rng as streams
from src.core.types import CLASS_ORDER, N_CLASSES, DamageClass, FeatureMatrix
from src.models.base import Estimator, Hyperparams, ModelVariant, Scaler, present_classes
from src.models.bayes import GaussianNB
from src.models.forest import RandomForest
from src.models.linear import LinearSvmOvO, LogisticOvR
from src.models.tree import DecisionTree
from src.utils.exceptions import ConfigurationError, DataError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

@dataclass
class SplitSpec:
    train_fraction: float = 0.75
    seed: int = 0
    stratified: bool = True

    def validate(self) -> None:
        """Validate configuration."""
        if not 0 < self.train_fraction < 1:
            raise ConfigurationError(f"train_fraction must be in (0, 1), got {self.train_fraction}")

@dataclass
class Model:
    """Trained classifier with the feature layout and scaler it was trained on."""
    variant: ModelVariant
    estimator: Estimator
    feature_names: Tuple[str, ...]
    scaler: Optional[Scaler] = None
    seed: int = 0

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

@dataclass
class EvalReport:
    accuracy: float
    confusion: np.ndarray  # rows = true class, columns = predicted, canonical order
    n_test: int
    seed: int
    variant: Optional[ModelVariant] = None

    @property
    def per_class_counts(self) -> Dict[str, int]:
        return {cls.value: int(self.confusion[cls.index].sum()) for cls in CLASS_ORDER}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variant": self.variant.value if self.variant else None,
            "accuracy": self.accuracy,
            "n_test": self.n_test,
            "seed": self.seed,
            "classes": [c.value for c in CLASS_ORDER],
            "confusion": self.confusion.tolist(),
            "per_class_counts": self.per_class_counts,
        }

@dataclass
class TrialSummary:
    variant: ModelVariant
    mean: float
    std: float
    accuracies: List[float]
    reports: List[EvalReport] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variant": self.variant.value,
            "mean_accuracy": self.mean,
            "std_accuracy": self.std,
            "accuracies": list(self.accuracies),
            "trials": [r.to_dict() for r in self.reports],
        }

def split(fm: FeatureMatrix, spec: SplitSpec) -> Tuple[FeatureMatrix, FeatureMatrix]:
    """Disjoint train/test partition, stratified by class when requested."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        train_idx: List[np.ndarray] = []
        for c in present_classes(fm.labels):
            rows = np.flatnonzero(fm.labels == c)
            if rows.size < 2:
                raise DataError(
                    f"class {DamageClass.from_index(c).value} has {rows.size} row(s); stratified split needs >= 2"
                )
            n_train = int(np.clip(round(spec.train_fraction * rows.size), 1, rows.size - 1))
            train_idx.append(rng.permutation(rows)[:n_train])
        train = np.sort(np.concatenate(train_idx))
    else:
        if fm.n_rows < 2:
            raise DataError("split needs at least 2 rows")
        n_train = int(np.clip(round(spec.train_fraction * fm.n_rows), 1, fm.n_rows - 1))
        train = np.sort(rng.permutation(fm.n_rows)[:n_train])
    test = np.setdiff1d(np.arange(fm.n_rows), train)
    return fm.take(train), fm.take(test)

def fit_scaler(X: np.ndarray) -> Scaler:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return Scaler(mean=mean, std=std)

def standardize(train: FeatureMatrix) -> Tuple[FeatureMatrix, Scaler]:
    """Zero-mean unit-std columns; constant columns keep std 1."""
    scaler = fit_scaler(train.rows)
    return train.with_rows(scaler.transform(train.rows)), scaler

def _make_estimator(variant: ModelVariant, hyper: Hyperparams, n_features: int) -> Estimator:
    if variant is ModelVariant.LOGISTIC_OVR:
        return LogisticOvR(l2=hyper.logistic_l2, max_iter=hyper.logistic_max_iter, tol=hyper.logistic_tol)
    if variant is ModelVariant.LINEAR_SVM_OVO:
        return LinearSvmOvO(c=hyper.svm_c, max_iter=hyper.svm_max_iter)
    if variant is ModelVariant.GAUSSIAN_NB:
        return GaussianNB(var_floor=hyper.nb_var_floor)
    if variant is ModelVariant.DECISION_TREE:
        return DecisionTree(max_depth=hyper.tree_max_depth, min_leaf=hyper.tree_min_leaf)
    return RandomForest(
        n_trees=hyper.forest_n_trees,
        max_features=hyper.max_features(n_features),
        bootstrap=hyper.forest_bootstrap,
        max_depth=hyper.tree_max_depth,
        min_leaf=hyper.tree_min_leaf,
    )

def train(variant: ModelVariant, train_fm: FeatureMatrix, hyper: Optional[Hyperparams] = None, seed: int = 0) -> Model:
    """Fit one classifier; Logistic and SVM see standardized features."""
    hyper = hyper or Hyperparams()
    hyper.validate()
    if present_classes(train_fm.labels).size < 2:
        raise DataError("training needs at least 2 classes")
    if not np.all(np.isfinite(train_fm.rows)):
        raise DataError("non-finite feature values in training data")

    X = train_fm.rows
    scaler = None
    if variant.needs_scaling:
        scaled, scaler = standardize(train_fm)
        X = scaled.rows
    estimator = _make_estimator(variant, hyper, train_fm.n_features)
    estimator.fit(X, train_fm.labels, np.random.default_rng(seed))
    logger.debug(f"Trained {variant.value} on {train_fm.n_rows} rows x {train_fm.n_features} features")
    return Model(variant=variant, estimator=estimator, feature_names=train_fm.feature_names, scaler=scaler, seed=seed)

def predict(model: Model, fm: FeatureMatrix) -> List[DamageClass]:
    """One label per row."""
    return [DamageClass.from_index(i) for i in predict_indices(model, fm.rows)]

def predict_indices(model: Model, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DataError(f"model expects {model.n_features} features, got matrix of shape {X.shape}")
    if X.shape[0] == 0:
        return np.zeros(0, dtype=int)
    if model.scaler is not None:
        X = model.scaler.transform(X)
    return model.estimator.predict(X)

def confusion_matrix(true: np.ndarray, predicted: np.ndarray) -> np.ndarray:
    confusion = np.zeros((N_CLASSES, N_CLASSES), dtype=int)
    np.add.at(confusion, (np.asarray(true, dtype=int), np.asarray(predicted, dtype=int)), 1)
    return confusion

def report_from_predictions(
    true: np.ndarray, predicted: np.ndarray, seed: int, variant: Optional[ModelVariant]
) -> EvalReport:
    if len(true) == 0:
        raise DataError("cannot evaluate on an empty test set")
    confusion = confusion_matrix(true, predicted)
    n_test = int(confusion.sum())
    return EvalReport(
        accuracy=float(np.trace(confusion) / n_test),
        confusion=confusion,
        n_test=n_test,
        seed=seed,
        variant=variant,
    )

def evaluate(model: Model, test: FeatureMatrix) -> EvalReport:
    """Accuracy and canonical-order confusion matrix on labelled rows."""
    if test.n_rows == 0:
        raise DataError("cannot evaluate on an empty test set")
    return report_from_predictions(test.labels, predict_indices(model, test.rows), model.seed, model.variant)

def repeated_trials(
    variant: ModelVariant,
    fm: FeatureMatrix,
    n: int = 10,
    master_seed: int = 0,
    hyper: Optional[Hyperparams] = None,
    train_fraction: float = 0.75,
    stratified: bool = True,
) -> TrialSummary:
    """``n`` independent split/train/evaluate runs on child seeds of ``master_seed``."""
    if n < 1:
        raise ConfigurationError(f"number of trials must be >= 1, got {n}")
    reports: List[EvalReport] = []
    for i in range(n):
        split_seed = streams.child_seed(master_seed, streams.SPLIT, i)
        train_fm, test_fm = split(fm, SplitSpec(train_fraction, split_seed, stratified))
        model = train(variant, train_fm, hyper, seed=streams.child_seed(master_seed, streams.TRAIN, i))
        report = evaluate(model, test_fm)
        report.seed = split_seed
        reports.append(report)
    accuracies = [r.accuracy for r in reports]
    summary = TrialSummary(
        variant=variant,
        mean=float(np.mean(accuracies)),
        std=float(np.std(accuracies)),
        accuracies=accuracies,
        reports=reports,
    )
    logger.info(f"✅ {variant.value}: accuracy {summary.mean:.4f} ± {summary.std:.4f} over {n} splits")
    return summary
