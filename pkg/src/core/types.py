"""Core data types shared across the guided-wave pipeline."""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.exceptions import DataError, SignalValidationError

class DamageClass(Enum):
    """Five-way damage label; declaration order is the canonical axis order."""
    BASELINE = "Baseline"
    CC = "CC"
    LFA = "LFA"
    HDC = "HDC"
    TRF = "TRF"

    @property
    def index(self) -> int:
        return CLASS_ORDER.index(self)

    @classmethod
    def from_label(cls, label: str) -> "DamageClass":
        """Parse a label case-insensitively ("baseline", "CC", ...)."""
        for member in cls:
            if member.value.lower() == str(label).strip().lower():
                return member
        raise DataError(f"Unknown damage class label '{label}'. Expected one of {[c.value for c in cls]}")

    @classmethod
    def from_index(cls, index: int) -> "DamageClass":
        return CLASS_ORDER[int(index)]

CLASS_ORDER: Tuple[DamageClass, ...] = tuple(DamageClass)
N_CLASSES = len(CLASS_ORDER)

class Provenance(Enum):
    SYNTHETIC = "synthetic"
    INGESTED = "ingested"
    AUGMENTED = "augmented"

class FeatureBank(Enum):
    BASELINE_REFERENCED = "baseline"
    BASELINE_FREE = "baseline-free"

    @classmethod
    def parse(cls, value: str) -> "FeatureBank":
        for member in cls:
            if value in (member.value, member.name.lower(), member.name):
                return member
        raise DataError(f"Unknown feature bank '{value}'")

@dataclass(frozen=True)
class SeriesMeta:
    """Acquisition metadata attached to every time series."""
    label: DamageClass
    path_id: str = "P2-2*"
    trial: int = 0
    copy: int = 0
    provenance: Provenance = Provenance.SYNTHETIC
    status: Optional[str] = None  # e.g. "zero-scale-noise"

    @property
    def key(self) -> str:
        """Filesystem-friendly identifier encoding class/path/trial/copy."""
        path = self.path_id.replace("*", "s").replace("/", "_")
        return f"{self.label.value}_{path}_t{self.trial:03d}_c{self.copy:03d}"

@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real-valued guided-wave record."""
    samples: np.ndarray
    dt: float
    meta: SeriesMeta

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1:
            raise SignalValidationError(f"samples must be one-dimensional, got shape {samples.shape}")
        if samples.size < 2:
            raise SignalValidationError(f"series needs at least 2 samples, got {samples.size}")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise SignalValidationError(f"dt must be positive and finite, got {self.dt}")
        if not np.all(np.isfinite(samples)):
            bad = int(np.flatnonzero(~np.isfinite(samples))[0])
            raise SignalValidationError(f"non-finite sample at index {bad}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "dt", float(self.dt))

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def fs(self) -> float:
        return 1.0 / self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt

    def with_samples(self, samples: np.ndarray, **meta_changes) -> "TimeSeries":
        """Copy with new samples (same dt) and optionally updated metadata."""
        meta = replace(self.meta, **meta_changes) if meta_changes else self.meta
        return TimeSeries(samples=samples, dt=self.dt, meta=meta)

FeatureVector = Dict[str, float]

@dataclass(frozen=True)
class FeatureProvenance:
    bank: FeatureBank
    baseline_path: str = ""

@dataclass(frozen=True)
class FeatureMatrix:
    """n-samples x d-features table with class labels and feature names."""
    rows: np.ndarray
    labels: np.ndarray  # canonical class indices
    feature_names: Tuple[str, ...]
    provenance: FeatureProvenance = field(
        default_factory=lambda: FeatureProvenance(FeatureBank.BASELINE_REFERENCED)
    )
    row_ids: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        rows = np.array(self.rows, dtype=float)
        labels = np.array(self.labels, dtype=int).reshape(-1)
        names = tuple(self.feature_names)
        if rows.ndim != 2:
            rows = rows.reshape(labels.size, len(names))
        if rows.shape != (labels.size, len(names)):
            raise DataError(
                f"inconsistent feature matrix: rows {rows.shape}, {labels.size} labels, {len(names)} names"
            )
        if len(set(names)) != len(names):
            raise DataError(f"duplicate feature names: {names}")
        if not np.all(np.isfinite(rows)):
            r, c = np.argwhere(~np.isfinite(rows))[0]
            raise DataError(f"non-finite feature value at row {r}, column '{names[c]}'")
        if labels.size and (labels.min() < 0 or labels.max() >= N_CLASSES):
            raise DataError("labels must be canonical damage-class indices")
        if self.row_ids and len(self.row_ids) != labels.size:
            raise DataError("row_ids length does not match number of rows")
        rows.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "row_ids", tuple(self.row_ids))

    @property
    def n_rows(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.rows.shape[1])

    @property
    def classes(self) -> List[DamageClass]:
        return [DamageClass.from_index(i) for i in self.labels]

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.feature_names.index(name)]

    def select_columns(self, names: Sequence[str]) -> "FeatureMatrix":
        missing = [n for n in names if n not in self.feature_names]
        if missing:
            raise DataError(f"unknown feature columns: {missing}")
        idx = [self.feature_names.index(n) for n in names]
        return replace(self, rows=self.rows[:, idx], feature_names=tuple(names))

    def take(self, indices: Sequence[int]) -> "FeatureMatrix":
        idx = np.asarray(indices, dtype=int)
        ids = tuple(self.row_ids[i] for i in idx) if self.row_ids else ()
        return replace(
            self,
            rows=self.rows[idx].reshape(idx.size, self.n_features),
            labels=self.labels[idx],
            row_ids=ids,
        )

    def with_rows(self, rows: np.ndarray) -> "FeatureMatrix":
        return replace(self, rows=rows)

    def with_column(self, name: str, values: np.ndarray) -> "FeatureMatrix":
        """Append a column (used to inject diagnostic features)."""
        rows = np.column_stack([self.rows, np.asarray(values, dtype=float)])
        return replace(self, rows=rows, feature_names=self.feature_names + (name,))
