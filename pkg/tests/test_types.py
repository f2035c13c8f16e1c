import numpy as np
import pytest

from src.core import rng as streams
from src.core.types import (
    CLASS_ORDER,
    DamageClass,
    FeatureBank,
    FeatureMatrix,
    SeriesMeta,
    TimeSeries,
)
from src.utils.exceptions import DataError, SignalValidationError

def test_class_order_is_canonical():
    assert [c.value for c in CLASS_ORDER] == ["Baseline", "CC", "LFA", "HDC", "TRF"]
    assert [c.index for c in CLASS_ORDER] == [0, 1, 2, 3, 4]
    assert DamageClass.from_label(" hdc ") is DamageClass.HDC
    assert DamageClass.from_index(4) is DamageClass.TRF

def test_unknown_label_rejected():
    with pytest.raises(DataError):
        DamageClass.from_label("crack")

def test_series_key_encodes_metadata():
    meta = SeriesMeta(label=DamageClass.CC, path_id="P2-2*", trial=3, copy=12)
    assert meta.key == "CC_P2-2s_t003_c012"

@pytest.mark.parametrize(
    "samples, dt",
    [
        ([1.0], 1e-7),
        ([1.0, 2.0], 0.0),
        ([1.0, np.nan], 1e-7),
        ([1.0, np.inf, 0.0], 1e-7),
        ([[1.0, 2.0]], 1e-7),
    ],
)
def test_time_series_validation(samples, dt):
    with pytest.raises(SignalValidationError):
        TimeSeries(samples=np.array(samples), dt=dt, meta=SeriesMeta(label=DamageClass.BASELINE))

def test_time_series_is_read_only():
    s = TimeSeries(samples=np.arange(4.0), dt=0.5, meta=SeriesMeta(label=DamageClass.BASELINE))
    with pytest.raises(ValueError):
        s.samples[0] = 1.0
    assert s.fs == 2.0
    np.testing.assert_array_equal(s.times, [0.0, 0.5, 1.0, 1.5])

def test_feature_matrix_rejects_non_finite_and_duplicates():
    with pytest.raises(DataError, match="row 1"):
        FeatureMatrix(rows=np.array([[1.0], [np.nan]]), labels=np.array([0, 1]), feature_names=("A",))
    with pytest.raises(DataError, match="duplicate"):
        FeatureMatrix(rows=np.zeros((2, 2)), labels=np.array([0, 1]), feature_names=("A", "A"))

def test_feature_matrix_column_operations():
    fm = FeatureMatrix(
        rows=np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]),
        labels=np.array([0, 1, 2]),
        feature_names=("A", "B"),
        row_ids=("r0", "r1", "r2"),
    )
    np.testing.assert_array_equal(fm.column("B"), [2.0, 4.0, 6.0])
    assert fm.select_columns(["B"]).feature_names == ("B",)
    taken = fm.take([2, 0])
    assert taken.row_ids == ("r2", "r0")
    np.testing.assert_array_equal(taken.labels, [2, 0])
    assert fm.with_column("C", [7.0, 8.0, 9.0]).n_features == 3

def test_feature_bank_parse():
    assert FeatureBank.parse("baseline-free") is FeatureBank.BASELINE_FREE
    with pytest.raises(DataError):
        FeatureBank.parse("wavelet")

def test_child_streams_are_keyed_not_ordered():
    first = streams.child_rng(42, streams.NOISE, 1, 2).standard_normal(5)
    streams.child_rng(42, streams.NOISE, 9, 9).standard_normal(100)
    again = streams.child_rng(42, streams.NOISE, 1, 2).standard_normal(5)
    np.testing.assert_array_equal(first, again)
    assert streams.child_seed(42, streams.SPLIT, 0) != streams.child_seed(42, streams.SPLIT, 1)
    assert streams.child_seed(42, streams.SPLIT, 0) != streams.child_seed(43, streams.SPLIT, 0)
    assert 0 <= streams.child_seed(42, streams.TRAIN) < 2**63
