"""Versioned JSON documents for trained models."""
import json
from pathlib import Path
from typing import Any, Dict, Type

from src.models.base import Estimator, ModelVariant, Scaler
from src.models.bayes import GaussianNB
from src.models.forest import RandomForest
from src.models.linear import LinearSvmOvO, LogisticOvR
from src.models.training import Model
from src.models.tree import DecisionTree
from src.utils.exceptions import DataError

MODEL_SCHEMA_VERSION = 1

_ESTIMATORS: Dict[ModelVariant, Type[Estimator]] = {
    ModelVariant.LOGISTIC_OVR: LogisticOvR,
    ModelVariant.LINEAR_SVM_OVO: LinearSvmOvO,
    ModelVariant.GAUSSIAN_NB: GaussianNB,
    ModelVariant.DECISION_TREE: DecisionTree,
    ModelVariant.RANDOM_FOREST: RandomForest,
}

def model_to_dict(model: Model) -> Dict[str, Any]:
    return {
        "schema_version": MODEL_SCHEMA_VERSION,
        "variant": model.variant.value,
        "seed": model.seed,
        "feature_names": list(model.feature_names),
        "scaler": model.scaler.to_params() if model.scaler is not None else None,
        "params": model.estimator.to_params(),
    }

def model_from_dict(document: Dict[str, Any]) -> Model:
    version = document.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise DataError(f"unsupported model schema_version {version}; expected {MODEL_SCHEMA_VERSION}")
    variant = ModelVariant.parse(document["variant"])
    scaler = Scaler.from_params(document["scaler"]) if document.get("scaler") else None
    return Model(
        variant=variant,
        estimator=_ESTIMATORS[variant].from_params(document["params"]),
        feature_names=tuple(document["feature_names"]),
        scaler=scaler,
        seed=int(document.get("seed", 0)),
    )

def save_model(model: Model, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model_to_dict(model), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path

def load_model(path: Path) -> Model:
    return model_from_dict(json.loads(path.read_text(encoding="utf-8")))
