"""Import externally recorded CSV captures into the internal series format."""
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from src.core.types import CLASS_ORDER, DamageClass, Provenance, SeriesMeta, TimeSeries
from src.signalgen.propagation import BASELINE_PATH, DAMAGE_PATH
from src.storage.manifest import blob_hash
from src.utils.exceptions import IngestError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

# Relative tolerance on sample-interval deviations.
DT_JITTER_TOLERANCE = 1e-6

@dataclass
class IngestSchema:
    """Column names of a capture file; ``series_column`` is optional."""

    time_column: str = "time"
    amplitude_column: str = "amplitude"
    label_column: str = "label"
    series_column: str = "series_id"
    path_column: str = "path_id"

def _line(index: int) -> int:
    # pandas row 0 is file line 2 (line 1 is the header).
    return int(index) + 2

def _read_table(path: Path, schema: IngestSchema) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype={schema.label_column: str}, float_precision="round_trip")
    except FileNotFoundError as e:
        raise IngestError(f"capture file not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise IngestError(f"cannot parse {path}: {e}") from e
    missing = [c for c in (schema.time_column, schema.amplitude_column, schema.label_column) if c not in frame.columns]
    if missing:
        raise IngestError(f"{path}: missing required columns {missing}; found {list(frame.columns)}")
    if frame.empty:
        raise IngestError(f"{path}: no data rows")
    return frame

def _numeric_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    values = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raw = frame[column].iloc[bad[0]]
        raise IngestError(f"{column} value '{raw}' is not a finite number", line=_line(frame.index[bad[0]]))
    return values

def _labels(frame: pd.DataFrame, column: str) -> List[DamageClass]:
    labels: List[DamageClass] = []
    known = {c.value.lower(): c for c in CLASS_ORDER}
    for index, raw in frame[column].items():
        if pd.isna(raw) or not str(raw).strip():
            raise IngestError("missing label", line=_line(index))
        label = known.get(str(raw).strip().lower())
        if label is None:
            raise IngestError(f"unknown label '{raw}'; expected one of {list(known.values())}", line=_line(index))
        labels.append(label)
    return labels

def _check_uniform(times: np.ndarray, rows: pd.Index) -> float:
    if times.size < 2:
        raise IngestError("series needs at least 2 samples", line=_line(rows[0]))
    steps = np.diff(times)
    dt = float(steps[0])
    if not dt > 0:
        raise IngestError(f"time must increase, got step {dt}", line=_line(rows[1]))
    deviation = np.abs(steps - dt) / dt
    bad = np.flatnonzero(deviation > DT_JITTER_TOLERANCE)
    if bad.size:
        k = int(bad[0])
        raise IngestError(
            f"non-uniform sampling: step {steps[k]:.6g} s deviates from dt={dt:.6g} s "
            f"by {deviation[k]:.2e} relative (tolerance {DT_JITTER_TOLERANCE:g})",
            line=_line(rows[k + 1]),
        )
    return float(np.mean(steps))

def ingest_csv(path: Path, schema: IngestSchema | None = None) -> Tuple[List[TimeSeries], Dict[str, Any]]:
    """Parse and validate a capture file.

    Rows are grouped into series by ``series_column`` when present, else by
    label. Trials are numbered per class in order of first appearance.
    Returns the series and a validation report.
    """
    schema = schema or IngestSchema()
    frame = _read_table(path, schema)
    times = _numeric_column(frame, schema.time_column)
    amplitudes = _numeric_column(frame, schema.amplitude_column)
    labels = _labels(frame, schema.label_column)

    group_column = schema.series_column if schema.series_column in frame.columns else schema.label_column
    groups = frame.groupby(frame[group_column].astype(str), sort=False).indices

    dataset: List[TimeSeries] = []
    trials: Dict[DamageClass, int] = {}
    series_report: List[Dict[str, Any]] = []
    for series_id, positions in sorted(groups.items(), key=lambda item: item[1][0]):
        rows = frame.index[positions]
        label = labels[positions[0]]
        for p in positions:
            if labels[p] is not label:
                raise IngestError(
                    f"series '{series_id}' mixes labels {label.value} and {labels[p].value}", line=_line(frame.index[p])
                )
        dt = _check_uniform(times[positions], rows)
        if schema.path_column in frame.columns:
            path_id = str(frame[schema.path_column].iloc[positions[0]])
        else:
            path_id = BASELINE_PATH if label is DamageClass.BASELINE else DAMAGE_PATH
        trial = trials.get(label, 0)
        trials[label] = trial + 1
        meta = SeriesMeta(label=label, path_id=path_id, trial=trial, copy=0, provenance=Provenance.INGESTED)
        dataset.append(TimeSeries(samples=amplitudes[positions], dt=dt, meta=meta))
        series_report.append({"series_id": series_id, "key": meta.key, "samples": int(positions.size), "dt": dt})

    report = {
        "source": Path(path).name,
        "source_hash": blob_hash(Path(path).read_bytes()),
        "n_rows": int(len(frame)),
        "n_series": len(dataset),
        "per_class": {c.value: sum(1 for s in dataset if s.meta.label is c) for c in CLASS_ORDER},
        "series": series_report,
    }
    logger.info(f"✅ Ingested {len(frame)} rows as {len(dataset)} series from {path}")
    return dataset, report
