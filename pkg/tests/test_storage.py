import json

import numpy as np
import pytest

from src.core.types import DamageClass, FeatureBank, Provenance, SeriesMeta, TimeSeries
from src.models.training import report_from_predictions
from src.selection.correlation import correlation_matrix
from src.signalgen.augment import NoiseConfig
from src.signalgen.dataset import build_dataset
from src.signalgen.propagation import default_scenarios
from src.storage import plots
from src.storage.csv_store import (
    DT_PREFIX,
    read_dataset,
    read_feature_matrix,
    read_series,
    write_dataset,
    write_feature_matrix,
    write_series,
)
from src.storage.manifest import MANIFEST_FILE, RunManifest, blob_hash, content_hash
from src.storage.reports import REPORT_SCHEMA_VERSION, read_report, write_report
from src.utils.exceptions import DataError
from tests.conftest import make_matrix

@pytest.fixture
def dataset():
    return build_dataset(list(default_scenarios().values()), 1, NoiseConfig(copies=2, seed=3))

class TestSeries:
    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        meta = SeriesMeta(label=DamageClass.HDC, path_id="P2-2*", trial=1, copy=2)
        series = TimeSeries(samples=rng.standard_normal(300) * 1e-3, dt=1e-8, meta=meta)
        path = write_series(series, tmp_path / "s.csv")
        assert path.read_text().splitlines()[:2] == [f"{DT_PREFIX}1e-08", "amplitude"]
        back = read_series(path, meta)
        assert back.dt == series.dt
        np.testing.assert_array_equal(back.samples, series.samples)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("amplitude\n1.0\n2.0\n")
        with pytest.raises(DataError, match="first line"):
            read_series(path)

class TestDataset:
    def test_round_trip(self, tmp_path, dataset):
        paths = write_dataset(dataset, tmp_path / "data")
        assert len(paths) == len(dataset) + 1
        back = read_dataset(tmp_path / "data")
        assert [s.meta for s in back] == [s.meta for s in dataset]
        for a, b in zip(back, dataset):
            np.testing.assert_array_equal(a.samples, b.samples)
        assert back[0].meta.provenance is Provenance.AUGMENTED

    def test_rewrite_is_byte_identical(self, tmp_path, dataset):
        first = write_dataset(dataset, tmp_path / "a")
        second = write_dataset(dataset, tmp_path / "b")
        assert [p.read_bytes() for p in first] == [p.read_bytes() for p in second]
        assert content_hash(first, tmp_path / "a") == content_hash(second, tmp_path / "b")

    def test_duplicate_keys(self, tmp_path, dataset):
        with pytest.raises(DataError, match="identical"):
            write_dataset([dataset[0], dataset[0]], tmp_path / "dup")

    def test_missing_index(self, tmp_path):
        with pytest.raises(DataError, match="index.csv"):
            read_dataset(tmp_path)

class TestFeatureMatrix:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        fm = make_matrix(rng.standard_normal((10, 3)), [0, 1, 2, 3, 4] * 2, ["RMSD", "SER", "CCD"])
        path = write_feature_matrix(fm, tmp_path / "features.csv")
        assert path.read_text().splitlines()[0] == "RMSD,SER,CCD,label"
        back = read_feature_matrix(path)
        assert back.feature_names == fm.feature_names
        np.testing.assert_array_equal(back.rows, fm.rows)
        np.testing.assert_array_equal(back.labels, fm.labels)
        assert back.provenance.bank is FeatureBank.BASELINE_REFERENCED

    def test_bank_inferred_from_columns(self, tmp_path):
        fm = make_matrix(np.ones((2, 2)), [0, 1], ["SF1", "SF7"])
        back = read_feature_matrix(write_feature_matrix(fm, tmp_path / "sf.csv"))
        assert back.provenance.bank is FeatureBank.BASELINE_FREE

    def test_missing_label(self, tmp_path):
        path = tmp_path / "nolabel.csv"
        path.write_text("A,B\n1,2\n")
        with pytest.raises(DataError, match="label"):
            read_feature_matrix(path)

class TestReports:
    def test_envelope_and_determinism(self, tmp_path):
        path = write_report(tmp_path / "r.json", "evaluation", {"b": 2, "a": [1.5]})
        text = path.read_text()
        document = json.loads(text)
        assert document["schema_version"] == REPORT_SCHEMA_VERSION
        assert document["kind"] == "evaluation"
        assert list(document) == sorted(document)
        assert text.endswith("\n")
        assert read_report(path, "evaluation")["a"] == [1.5]

    def test_kind_checked(self, tmp_path):
        path = write_report(tmp_path / "r.json", "selection", {})
        with pytest.raises(DataError, match="expected a 'evaluation' report"):
            read_report(path, "evaluation")

    def test_nan_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_report(tmp_path / "r.json", "x", {"value": float("nan")})

class TestManifest:
    def test_blob_hash_matches_git(self):
        assert blob_hash(b"hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a"

    def test_record_save_load_verify(self, tmp_path):
        out = tmp_path / "run"
        path = write_report(out / "reports" / "x.json", "x", {"v": 1})
        manifest = RunManifest(config_hash="abc")
        manifest.record("eval", [path], out, seconds=0.5)
        manifest.save(out)
        assert (out / MANIFEST_FILE).exists()

        loaded = RunManifest.load(out)
        assert loaded.config_hash == "abc"
        assert loaded.find("eval", "x.json") == "reports/x.json"
        loaded.verify(out, "eval")

        path.write_text("tampered\n")
        with pytest.raises(DataError, match="changed"):
            loaded.verify(out, "eval")

    def test_unknown_stage(self, tmp_path):
        with pytest.raises(DataError, match="run it first"):
            RunManifest(config_hash="abc").find("train", "model.json")

    def test_load_requires_a_manifest(self, tmp_path):
        with pytest.raises(DataError):
            RunManifest.load(tmp_path)

class TestPlots:
    def test_figures_are_svg_and_stable(self, tmp_path, dataset):
        report = report_from_predictions(np.array([0, 1, 2, 3, 4]), np.array([0, 1, 2, 3, 3]), 0, None)
        first = plots.plot_confusion(report, tmp_path / "a" / "confusion.svg")
        second = plots.plot_confusion(report, tmp_path / "b" / "confusion.svg")
        assert first.read_text().lstrip().startswith("<?xml")
        assert first.read_bytes() == second.read_bytes()
        assert plots.plot_signals(dataset[:2], tmp_path / "signals.svg").exists()

    def test_correlation_heatmap(self, tmp_path):
        rng = np.random.default_rng(2)
        fm = make_matrix(rng.standard_normal((20, 3)), [0, 1] * 10)
        assert plots.plot_correlation(correlation_matrix(fm), tmp_path / "corr.svg").stat().st_size > 0
