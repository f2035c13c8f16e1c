"""CSV persistence for time series, datasets and feature matrices."""
import io
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.core.types import (
    DamageClass,
    FeatureBank,
    FeatureMatrix,
    FeatureProvenance,
    Provenance,
    SeriesMeta,
    TimeSeries,
)
from src.features.baseline_free import BASELINE_FREE_FEATURES
from src.utils.exceptions import DataError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

DT_PREFIX = "# dt="
INDEX_FILE = "index.csv"
INDEX_COLUMNS = ["file", "label", "path_id", "trial", "copy", "provenance", "status"]
LABEL_COLUMN = "label"

def _write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    return path

def write_series(series: TimeSeries, path: Path) -> Path:
    """``# dt=<seconds>`` header line, then a single ``amplitude`` column."""
    body = pd.DataFrame({"amplitude": series.samples}).to_csv(index=False, lineterminator="\n")
    return _write_text(path, f"{DT_PREFIX}{series.dt!r}\n{body}")

def read_series(path: Path, meta: Optional[SeriesMeta] = None) -> TimeSeries:
    text = Path(path).read_text(encoding="utf-8")
    header, _, body = text.partition("\n")
    if not header.startswith(DT_PREFIX):
        raise DataError(f"{path}: first line must be '{DT_PREFIX}<seconds>'")
    try:
        dt = float(header[len(DT_PREFIX):])
    except ValueError as e:
        raise DataError(f"{path}: invalid dt header '{header}'") from e
    frame = pd.read_csv(io.StringIO(body), float_precision="round_trip")
    if "amplitude" not in frame.columns:
        raise DataError(f"{path}: missing 'amplitude' column")
    meta = meta or SeriesMeta(label=DamageClass.BASELINE, provenance=Provenance.INGESTED)
    return TimeSeries(samples=frame["amplitude"].to_numpy(dtype=float), dt=dt, meta=meta)

def write_dataset(dataset: Sequence[TimeSeries], directory: Path) -> List[Path]:
    """One CSV per series plus ``index.csv`` carrying the metadata of each file."""
    directory.mkdir(parents=True, exist_ok=True)
    paths: List[Path] = []
    records: List[Dict[str, object]] = []
    for series in dataset:
        name = f"{series.meta.key}.csv"
        paths.append(write_series(series, directory / name))
        records.append(
            {
                "file": name,
                "label": series.meta.label.value,
                "path_id": series.meta.path_id,
                "trial": series.meta.trial,
                "copy": series.meta.copy,
                "provenance": series.meta.provenance.value,
                "status": series.meta.status or "",
            }
        )
    if len({r["file"] for r in records}) != len(records):
        raise DataError("dataset contains series with identical class/path/trial/copy keys")
    index = pd.DataFrame(records, columns=INDEX_COLUMNS)
    paths.append(_write_text(directory / INDEX_FILE, index.to_csv(index=False, lineterminator="\n")))
    logger.info(f"✅ Wrote {len(dataset)} series to {directory}")
    return paths

def read_dataset(directory: Path) -> List[TimeSeries]:
    index_path = directory / INDEX_FILE
    if not index_path.exists():
        raise DataError(f"no {INDEX_FILE} in {directory}")
    index = pd.read_csv(index_path, dtype={"status": str}, keep_default_na=False)
    missing = [c for c in INDEX_COLUMNS if c not in index.columns]
    if missing:
        raise DataError(f"{index_path}: missing columns {missing}")
    dataset: List[TimeSeries] = []
    for record in index.itertuples(index=False):
        meta = SeriesMeta(
            label=DamageClass.from_label(record.label),
            path_id=str(record.path_id),
            trial=int(record.trial),
            copy=int(record.copy),
            provenance=Provenance(record.provenance),
            status=record.status or None,
        )
        dataset.append(read_series(directory / record.file, meta))
    return dataset

def write_feature_matrix(fm: FeatureMatrix, path: Path) -> Path:
    """Feature id columns followed by ``label`` (class name)."""
    frame = pd.DataFrame(fm.rows, columns=list(fm.feature_names))
    frame[LABEL_COLUMN] = [c.value for c in fm.classes]
    return _write_text(path, frame.to_csv(index=False, lineterminator="\n"))

def read_feature_matrix(path: Path) -> FeatureMatrix:
    frame = pd.read_csv(path, float_precision="round_trip")
    if LABEL_COLUMN not in frame.columns:
        raise DataError(f"{path}: missing '{LABEL_COLUMN}' column")
    names = tuple(c for c in frame.columns if c != LABEL_COLUMN)
    bank = (
        FeatureBank.BASELINE_FREE
        if names and set(names) <= set(BASELINE_FREE_FEATURES)
        else FeatureBank.BASELINE_REFERENCED
    )
    labels = np.array([DamageClass.from_label(v).index for v in frame[LABEL_COLUMN]], dtype=int)
    return FeatureMatrix(
        rows=frame[list(names)].to_numpy(dtype=float).reshape(len(frame), len(names)),
        labels=labels,
        feature_names=names,
        provenance=FeatureProvenance(bank),
    )
