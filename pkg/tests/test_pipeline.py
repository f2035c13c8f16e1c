import copy
import dataclasses

import numpy as np
import pandas as pd
import pytest

from src.config.settings import PipelineConfig
from src.core import rng as streams
from src.core.pipeline import DamagePipeline
from src.core.stage_runner import STAGE_ORDER, downstream
from src.core.types import FeatureBank
from src.dsp.transform import wavelet_denoise
from src.features.matrix import build_feature_matrix
from src.interpret.permutation import permutation_importance
from src.models.base import ModelVariant
from src.models.training import SplitSpec, repeated_trials, split, train
from src.selection.correlation import filter_features
from src.signalgen.dataset import build_dataset
from src.storage.manifest import RunManifest
from src.storage.reports import read_report
from src.utils.exceptions import DataError

STAGES = {"synth", "denoise", "features", "select", "train", "eval", "importance"}

def variant_of(config: PipelineConfig, out_dir, **changes) -> PipelineConfig:
    """Copy of ``config`` writing to ``out_dir`` with dotted-section overrides."""
    config = copy.deepcopy(config)
    config.io.out_dir = str(out_dir)
    for dotted, value in changes.items():
        section, key = dotted.split("__")
        setattr(getattr(config, section), key, value)
    return config

def test_full_run_is_complete_and_reproducible(small_config, tmp_path):
    result = DamagePipeline(small_config).run()
    out = small_config.out_dir

    assert set(result.summaries) == set(ModelVariant)
    assert result.best is max(result.summaries, key=lambda v: result.summaries[v].mean)
    assert all(len(s.accuracies) == 2 and 0.0 <= s.mean <= 1.0 for s in result.summaries.values())
    assert list(result.importance) == [result.best]

    expected = [
        "dataset/index.csv",
        "denoised/index.csv",
        "features/features.csv",
        "selection/selected.csv",
        "split/train.csv",
        "split/test.csv",
        "reports/synth.json",
        "reports/selection.json",
        "reports/evaluation.json",
        f"reports/importance_{result.best.value}.json",
        f"reports/importance_{result.best.value}.csv",
        "manifest.json",
    ] + [f"models/{v.value}.json" for v in ModelVariant]
    assert [p for p in expected if not (out / p).exists()] == []
    assert set(RunManifest.load(out).stages) == STAGES

    evaluation = read_report(out / "reports" / "evaluation.json", "evaluation")
    assert evaluation["best_variant"] == result.best.value
    assert evaluation["n_rows"] == 40
    assert evaluation["features"] == result.selection.kept

    again = variant_of(small_config, tmp_path / "again")
    DamagePipeline(again).run()
    for name in ("features/features.csv", "reports/selection.json", "reports/evaluation.json"):
        assert (out / name).read_bytes() == (again.out_dir / name).read_bytes(), name
    best_report = f"reports/importance_{result.best.value}.json"
    assert (out / best_report).read_bytes() == (again.out_dir / best_report).read_bytes()

def test_stage_errors_name_the_stage(small_config):
    pipeline = DamagePipeline(small_config)
    with pytest.raises(DataError, match=r"^\[stage denoise\] no dataset"):
        pipeline.denoise()
    with pytest.raises(DataError, match=r"^\[stage features\] .*run it first"):
        pipeline.extract_features()

def test_changed_inputs_are_detected(small_config):
    pipeline = DamagePipeline(small_config)
    pipeline.synthesize()
    index = small_config.out_dir / "dataset" / "index.csv"
    index.write_text(index.read_text() + "\n")
    with pytest.raises(DataError, match="changed since stage 'synth'"):
        pipeline.denoise()

def test_downstream_stages() -> None:
    assert downstream("select") == ("select", "train", "eval", "importance")
    assert downstream("ingest") == STAGE_ORDER
    assert "synth" in downstream("ingest") and "ingest" in downstream("synth")
    assert downstream("sweep") == ("sweep",)

def test_rerunning_a_stage_drops_everything_built_on_it(small_config):
    DamagePipeline(small_config).run()
    out = small_config.out_dir

    DamagePipeline(small_config).extract_features()
    assert set(RunManifest.load(out).stages) == {"synth", "denoise", "features"}

    reseeded = variant_of(small_config, out)
    reseeded.master_seed = small_config.master_seed + 1
    reseeded.validate()
    pipeline = DamagePipeline(reseeded)
    pipeline.synthesize()
    assert set(RunManifest.load(out).stages) == {"synth"}
    with pytest.raises(DataError, match=r"^\[stage features\] .*run it first"):
        pipeline.extract_features()
    with pytest.raises(DataError, match=r"^\[stage select\] .*run it first"):
        pipeline.select()

def test_stages_resume_from_the_manifest(small_config):
    DamagePipeline(small_config).synthesize()
    resumed = DamagePipeline(small_config)
    assert len(resumed.denoise()) == 40
    assert resumed.extract_features().n_features == 10

def test_baseline_free_bank(small_config, tmp_path):
    config = variant_of(small_config, tmp_path / "free", features__bank=FeatureBank.BASELINE_FREE.value)
    pipeline = DamagePipeline(config)
    pipeline.synthesize()
    pipeline.denoise()
    fm = pipeline.extract_features()
    assert fm.feature_names == tuple(f"SF{i}" for i in range(1, 14))
    assert fm.n_rows == 40

def test_plots_and_all_importance(small_config, tmp_path):
    config = variant_of(
        small_config,
        tmp_path / "plots",
        models__variants=["DecisionTree", "GaussianNB"],
        io__plot=True,
        evaluation__all_importance=True,
    )
    result = DamagePipeline(config).run()
    assert set(result.importance) == {ModelVariant.DECISION_TREE, ModelVariant.GAUSSIAN_NB}
    plots = config.out_dir / "plots"
    for name in ("signals", "denoised", "correlation", "confusion_DecisionTree", "importance_GaussianNB"):
        assert (plots / f"{name}.svg").exists(), name

def test_ingested_capture_runs_end_to_end(small_config, tmp_path):
    synthetic = build_dataset(small_config.scenarios.resolve(), 2, dataclasses.replace(small_config.noise, copies=1))
    frames = [
        pd.DataFrame(
            {
                "time": np.arange(s.samples.size) * s.dt,
                "amplitude": s.samples,
                "label": s.meta.label.value,
                "series_id": s.meta.key,
            }
        )
        for s in synthetic
    ]
    capture = tmp_path / "capture.csv"
    pd.concat(frames).to_csv(capture, index=False)

    config = variant_of(small_config, tmp_path / "ingested", models__variants=["DecisionTree"])
    result = DamagePipeline(config).run(capture)
    assert list(result.summaries) == [ModelVariant.DECISION_TREE]
    manifest = RunManifest.load(config.out_dir)
    assert "ingest" in manifest.stages and "synth" not in manifest.stages
    assert read_report(config.out_dir / "reports" / "ingest.json", "ingest")["n_series"] == 10

def test_severity_sweep(small_config):
    payload = DamagePipeline(small_config).sweep()
    assert payload["levels"] == 3 and len(payload["sizes"]) == 3
    assert payload["n_rows"] == 3 * 5 * 2
    assert payload["evaluation"]["variant"] == "RandomForest"
    assert read_report(small_config.out_dir / "reports" / "sweep.json", "sweep")["n_rows"] == 30
    assert (small_config.out_dir / "sweep" / "features.csv").exists()

# Full-size runs on the default 1000-row surrogate dataset.

@pytest.fixture(scope="module")
def surrogate():
    config = PipelineConfig()
    config.validate()
    dataset = build_dataset(
        config.scenarios.resolve(),
        config.dataset.trials_per_class,
        config.noise,
        excitation=config.excitation,
        coupling=config.coupling,
    )
    denoised = [wavelet_denoise(s, config.wavelet) for s in dataset]
    reference = build_feature_matrix(denoised, config.dataset.baseline_path, FeatureBank.BASELINE_REFERENCED)
    selected, selection = filter_features(reference, config.selection.threshold)
    return config, denoised, selected, selection

@pytest.fixture(scope="module")
def forest_summary(surrogate):
    config, _, selected, _ = surrogate
    return repeated_trials(
        ModelVariant.RANDOM_FOREST, selected, n=config.evaluation.n_trials, master_seed=config.master_seed
    )

@pytest.fixture(scope="module")
def summaries(surrogate, forest_summary):
    config, _, selected, _ = surrogate
    others = (ModelVariant.DECISION_TREE, ModelVariant.LOGISTIC_OVR, ModelVariant.LINEAR_SVM_OVO)
    result = {
        v: repeated_trials(v, selected, n=config.evaluation.n_trials, master_seed=config.master_seed) for v in others
    }
    result[ModelVariant.RANDOM_FOREST] = forest_summary
    return result

def seeds_where(condition, n: int) -> int:
    return sum(1 for i in range(n) if condition(i))

@pytest.mark.slow
def test_trees_lead_the_linear_models_split_by_split(surrogate, summaries):
    config, _, selected, _ = surrogate
    assert selected.n_rows == 1000
    acc = {v: s.accuracies for v, s in summaries.items()}
    rf, dt = acc[ModelVariant.RANDOM_FOREST], acc[ModelVariant.DECISION_TREE]
    linear = [max(a, b) for a, b in zip(acc[ModelVariant.LOGISTIC_OVR], acc[ModelVariant.LINEAR_SVM_OVO])]
    n = config.evaluation.n_trials
    assert seeds_where(lambda i: rf[i] >= dt[i] > linear[i], n) >= 8
    assert summaries[ModelVariant.RANDOM_FOREST].mean >= 0.95
    assert summaries[ModelVariant.DECISION_TREE].mean >= 0.90

@pytest.mark.slow
def test_baseline_free_bank_trails_baseline_referenced(surrogate, forest_summary):
    config, denoised, _, _ = surrogate
    free = build_feature_matrix(denoised, config.dataset.baseline_path, FeatureBank.BASELINE_FREE)
    selected_free, _ = filter_features(free, config.selection.threshold)
    summary = repeated_trials(
        ModelVariant.RANDOM_FOREST, selected_free, n=config.evaluation.n_trials, master_seed=config.master_seed
    )
    gaps = [ref - alone for ref, alone in zip(forest_summary.accuracies, summary.accuracies)]
    assert seeds_where(lambda i: gaps[i] >= 0.10, len(gaps)) >= 8

@pytest.mark.slow
def test_rmsd_ranks_first_and_noise_column_does_not_matter(surrogate):
    config, _, selected, selection = surrogate
    assert "RMSD" in selection.kept
    rng = np.random.default_rng(config.master_seed)
    with_noise = selected.with_column("NOISE", rng.standard_normal(selected.n_rows))

    n = config.evaluation.n_trials
    first: list[str] = []
    noise_drops: list[float] = []
    for i in range(n):
        split_seed = streams.child_seed(config.master_seed, streams.SPLIT, i)
        train_fm, test_fm = split(with_noise, SplitSpec(config.evaluation.train_fraction, split_seed, True))
        model = train(
            ModelVariant.RANDOM_FOREST, train_fm, seed=streams.child_seed(config.master_seed, streams.TRAIN, i)
        )
        report = permutation_importance(
            model,
            test_fm,
            repeats=config.evaluation.importance_repeats,
            seed=streams.child_seed(config.master_seed, streams.PERMUTE, i),
        )
        first.append(report.ranking()[0])
        noise_drops.append(report.entry("NOISE").mean_drop)

    assert first.count("RMSD") >= 8, first
    assert all(abs(drop) <= 0.02 for drop in noise_drops), noise_drops

@pytest.mark.slow
def test_default_severity_sweep(tmp_path):
    config = PipelineConfig()
    config.io.out_dir = str(tmp_path)
    payload = DamagePipeline(config).sweep()
    assert payload["n_rows"] == 450
    assert payload["evaluation"]["mean_accuracy"] >= 0.60
