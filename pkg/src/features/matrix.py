"""Feature-matrix assembly from a preprocessed dataset."""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from src.core.types import FeatureBank, FeatureMatrix, FeatureProvenance, TimeSeries
from src.features.baseline_free import BASELINE_FREE_FEATURES, extract_baseline_free
from src.features.time_domain import TIME_FEATURES, extract_time_features
from src.utils.exceptions import BaselinePairingError, DataError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

def feature_names(bank: FeatureBank) -> tuple[str, ...]:
    return TIME_FEATURES if bank is FeatureBank.BASELINE_REFERENCED else BASELINE_FREE_FEATURES

def baseline_references(dataset: Sequence[TimeSeries], baseline_path: str) -> Dict[int, TimeSeries]:
    """Lowest-copy baseline-path series of every baseline trial, keyed by trial."""
    refs: Dict[int, TimeSeries] = {}
    for series in dataset:
        if series.meta.path_id != baseline_path:
            continue
        current = refs.get(series.meta.trial)
        if current is None or series.meta.copy < current.meta.copy:
            refs[series.meta.trial] = series
    return dict(sorted(refs.items()))

def pair_baselines(dataset: Sequence[TimeSeries], baseline_path: str) -> List[TimeSeries]:
    """Baseline for each series, from the same acquisition where one was recorded.

    Lookup order: the baseline-path series with the same (trial, copy); the
    lowest copy of the same trial; the lowest copy of trial
    ``t mod n_baseline_trials``. Baseline series pair with themselves.
    """
    refs = baseline_references(dataset, baseline_path)
    acquisitions: Dict[Tuple[int, int], TimeSeries] = {
        (s.meta.trial, s.meta.copy): s for s in dataset if s.meta.path_id == baseline_path
    }
    if not refs:
        raise BaselinePairingError(
            f"no series on baseline path '{baseline_path}'",
            unpaired=[s.meta.key for s in dataset],
        )
    trials = list(refs)
    paired: List[TimeSeries] = []
    unpaired: List[str] = []
    for series in dataset:
        t = series.meta.trial
        ref = acquisitions.get((t, series.meta.copy))
        if ref is None:
            ref = refs[t] if t in refs else refs[trials[t % len(trials)]]
        if len(ref) != len(series) or not np.isclose(ref.dt, series.dt, rtol=1e-9, atol=0):
            unpaired.append(series.meta.key)
        paired.append(ref)
    if unpaired:
        raise BaselinePairingError(
            f"{len(unpaired)} series have no length/dt-compatible baseline: {unpaired[:10]}",
            unpaired=unpaired,
        )
    return paired

def build_feature_matrix(
    dataset: Sequence[TimeSeries],
    baseline_path: str,
    bank: FeatureBank,
    workers: int = 1,
    printed_sf4: bool = False,
) -> FeatureMatrix:
    """One row per series, columns in the bank's fixed vocabulary order."""
    if not dataset:
        raise DataError("cannot build a feature matrix from an empty dataset")

    names = feature_names(bank)
    extract: Callable[[int], Dict[str, float]]
    if bank is FeatureBank.BASELINE_REFERENCED:
        baselines = pair_baselines(dataset, baseline_path)
        extract = lambda i: extract_time_features(dataset[i], baselines[i])  # noqa: E731
    else:
        extract = lambda i: extract_baseline_free(dataset[i], printed_sf4=printed_sf4)  # noqa: E731

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vectors = list(pool.map(extract, range(len(dataset))))
    else:
        vectors = [extract(i) for i in range(len(dataset))]

    rows = np.array([[vector[name] for name in names] for vector in vectors], dtype=float)
    fm = FeatureMatrix(
        rows=rows,
        labels=np.array([s.meta.label.index for s in dataset]),
        feature_names=names,
        provenance=FeatureProvenance(bank=bank, baseline_path=baseline_path),
        row_ids=tuple(s.meta.key for s in dataset),
    )
    logger.info(f"✅ Feature matrix ({bank.value}): {fm.n_rows} x {fm.n_features}")
    return fm
