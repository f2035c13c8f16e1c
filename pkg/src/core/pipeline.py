"""End-to-end damage classification pipeline over a run directory."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.cli.ingest import IngestSchema, ingest_csv
from src.config.settings import PipelineConfig
from src.core import rng as streams
from src.core.stage_runner import StageRunner
from src.core.types import CLASS_ORDER, FeatureMatrix, TimeSeries
from src.dsp.transform import band_edges, wavelet_denoise
from src.features.matrix import build_feature_matrix
from src.interpret.permutation import ImportanceReport, permutation_importance
from src.models.base import ModelVariant
from src.models.serialization import load_model, save_model
from src.models.training import SplitSpec, TrialSummary, evaluate, repeated_trials, split, train
from src.selection.correlation import SelectionReport, filter_features
from src.signalgen.augment import add_noise, snr_db
from src.signalgen.dataset import build_dataset, build_severity_sweep, count_by_class, severity_levels
from src.signalgen.excitation import hann_toneburst
from src.storage import plots
from src.storage.csv_store import read_dataset, read_feature_matrix, write_dataset, write_feature_matrix
from src.storage.manifest import content_hash
from src.storage.reports import read_report, write_report
from src.utils.exceptions import DataError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

DATASET_DIR = "dataset"
DENOISED_DIR = "denoised"
FEATURES_CSV = "features/features.csv"
SELECTED_CSV = "selection/selected.csv"
TRAIN_CSV = "split/train.csv"
TEST_CSV = "split/test.csv"
MODELS_DIR = "models"
REPORTS_DIR = "reports"
PLOTS_DIR = "plots"
SWEEP_DIR = "sweep"

@dataclass
class PipelineResult:
    selection: SelectionReport
    summaries: Dict[ModelVariant, TrialSummary]
    best: ModelVariant
    importance: Dict[ModelVariant, ImportanceReport] = field(default_factory=dict)

    def accuracies(self) -> Dict[str, float]:
        return {v.value: s.mean for v, s in self.summaries.items()}

def representatives(dataset: Sequence[TimeSeries]) -> List[TimeSeries]:
    """First series of every class present, in canonical order."""
    chosen: Dict[Any, TimeSeries] = {}
    for series in dataset:
        chosen.setdefault(series.meta.label, series)
    return [chosen[c] for c in CLASS_ORDER if c in chosen]

class DamagePipeline:
    """Runs the acquisition, preprocessing, feature, selection, training and interpretation stages.

    Every stage reads its inputs from files an earlier stage listed in the
    run manifest, so stages can be invoked one at a time from the CLI or
    all together through :meth:`run`.
    """

    def __init__(self, config: Optional[PipelineConfig] = None):
        self.config = config or PipelineConfig.create()
        self.config.validate()
        self.out_dir = self.config.out_dir
        self.runner = StageRunner(self.out_dir, self.config.config_hash())

    def _path(self, relative: str) -> Path:
        return self.out_dir / relative

    def _split_seed(self) -> int:
        return streams.child_seed(self.config.master_seed, streams.SPLIT, 0)

    def _train_seed(self) -> int:
        return streams.child_seed(self.config.master_seed, streams.TRAIN, 0)

    def _denoise_all(self, dataset: Sequence[TimeSeries]) -> List[TimeSeries]:
        spec = self.config.wavelet
        workers = self.config.dataset.workers
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(lambda s: wavelet_denoise(s, spec), dataset))
        return [wavelet_denoise(s, spec) for s in dataset]

    # ------------------------------------------------------------------ stages

    def synthesize(self) -> List[TimeSeries]:
        """Synthetic dataset: trials x copies series per class."""
        cfg = self.config
        with self.runner.stage("synth"):
            dataset = build_dataset(
                cfg.scenarios.resolve(),
                cfg.dataset.trials_per_class,
                cfg.noise,
                excitation=cfg.excitation,
                coupling=cfg.coupling,
                workers=cfg.dataset.workers,
            )
            paths = write_dataset(dataset, self._path(DATASET_DIR))

            burst = hann_toneburst(cfg.excitation)
            noisy = add_noise(burst, cfg.noise.beta_n, streams.child_seed(cfg.master_seed, streams.NOISE))
            snr = (
                {"rms_db": snr_db(burst, noisy, "rms"), "peak_db": snr_db(burst, noisy, "peak")}
                if cfg.noise.beta_n > 0
                else {}
            )
            report = write_report(
                self._path(f"{REPORTS_DIR}/synth.json"),
                "synth",
                {
                    "n_series": len(dataset),
                    "per_class": count_by_class(dataset),
                    "excitation_snr": snr,
                    "scenarios": [s.to_dict() for s in cfg.scenarios.resolve()],
                    "master_seed": cfg.master_seed,
                },
            )
            self.runner.record("synth", paths + [report])
            if cfg.io.plot:
                self.runner.record(
                    "synth", [plots.plot_signals(representatives(dataset), self._path(f"{PLOTS_DIR}/signals.svg"))]
                )
            self.runner.manifest.input_hash = content_hash(paths, root=self.out_dir)
        return dataset

    def ingest(self, source: Path, schema: Optional[IngestSchema] = None) -> List[TimeSeries]:
        """External capture file converted to the internal series format."""
        with self.runner.stage("ingest"):
            dataset, validation = ingest_csv(source, schema)
            paths = write_dataset(dataset, self._path(DATASET_DIR))
            report = write_report(self._path(f"{REPORTS_DIR}/ingest.json"), "ingest", validation)
            self.runner.record("ingest", paths + [report])
            self.runner.manifest.input_hash = validation["source_hash"]
        return dataset

    def _dataset_stage(self) -> str:
        for stage in ("ingest", "synth"):
            if self.runner.has(stage):
                return stage
        raise DataError(f"no dataset in {self.out_dir}; run 'synth' or 'ingest' first")

    def denoise(self) -> List[TimeSeries]:
        """Offset removal and single-band wavelet reconstruction of every series."""
        with self.runner.stage("denoise"):
            index = self.runner.input_path(self._dataset_stage(), f"{DATASET_DIR}/index.csv")
            dataset = read_dataset(index.parent)
            spec = self.config.wavelet
            low, high = band_edges(dataset[0].fs, spec.selected_level)
            carrier = self.config.excitation.f
            if low <= carrier <= high:
                logger.info(
                    f"Detail level {spec.selected_level} spans {low:.4g}-{high:.4g} Hz and contains the carrier"
                )
            else:
                logger.warning(
                    f"⚠️ Detail level {spec.selected_level} spans {low:.4g}-{high:.4g} Hz; "
                    f"carrier {carrier:.4g} Hz lies outside it"
                )
            denoised = self._denoise_all(dataset)
            paths = write_dataset(denoised, self._path(DENOISED_DIR))
            self.runner.record("denoise", paths)
            if self.config.io.plot:
                figure = self._path(f"{PLOTS_DIR}/denoised.svg")
                self.runner.record(
                    "denoise", [plots.plot_signals(representatives(denoised), figure, "Denoised signals")]
                )
        return denoised

    def extract_features(self) -> FeatureMatrix:
        with self.runner.stage("features"):
            index = self.runner.input_path("denoise", f"{DENOISED_DIR}/index.csv")
            dataset = read_dataset(index.parent)
            fm = build_feature_matrix(
                dataset,
                self.config.dataset.baseline_path,
                self.config.bank,
                workers=self.config.dataset.workers,
                printed_sf4=self.config.features.printed_sf4,
            )
            self.runner.record("features", [write_feature_matrix(fm, self._path(FEATURES_CSV))])
        return fm

    def select(self) -> tuple[FeatureMatrix, SelectionReport]:
        with self.runner.stage("select"):
            fm = read_feature_matrix(self.runner.input_path("features", FEATURES_CSV))
            selected, report = filter_features(fm, self.config.selection.threshold)
            outputs = [
                write_feature_matrix(selected, self._path(SELECTED_CSV)),
                write_report(
                    self._path(f"{REPORTS_DIR}/selection.json"),
                    "selection",
                    {"bank": self.config.bank.value, **report.to_dict()},
                ),
            ]
            if self.config.io.plot and report.correlation is not None:
                outputs.append(plots.plot_correlation(report.correlation, self._path(f"{PLOTS_DIR}/correlation.svg")))
            self.runner.record("select", outputs)
        return selected, report

    def train_models(self) -> Dict[ModelVariant, Path]:
        """Fit every configured variant on the first seeded split and persist it."""
        cfg = self.config
        with self.runner.stage("train"):
            fm = read_feature_matrix(self.runner.input_path("select", SELECTED_CSV))
            spec = SplitSpec(cfg.evaluation.train_fraction, self._split_seed(), cfg.evaluation.stratified)
            train_fm, test_fm = split(fm, spec)
            outputs = [
                write_feature_matrix(train_fm, self._path(TRAIN_CSV)),
                write_feature_matrix(test_fm, self._path(TEST_CSV)),
            ]
            saved: Dict[ModelVariant, Path] = {}
            for variant in cfg.models.parsed_variants():
                model = train(variant, train_fm, cfg.models.hyperparams, seed=self._train_seed())
                saved[variant] = save_model(model, self._path(f"{MODELS_DIR}/{variant.value}.json"))
                outputs.append(saved[variant])
            self.runner.record("train", outputs)
        return saved

    def evaluate_models(self) -> tuple[Dict[ModelVariant, TrialSummary], ModelVariant]:
        """Held-out evaluation of the saved models plus repeated seeded splits per variant."""
        cfg = self.config
        with self.runner.stage("eval"):
            fm = read_feature_matrix(self.runner.input_path("select", SELECTED_CSV))
            test_fm = read_feature_matrix(self.runner.input_path("train", TEST_CSV))
            summaries: Dict[ModelVariant, TrialSummary] = {}
            entries: Dict[str, Any] = {}
            outputs: List[Path] = []
            for variant in cfg.models.parsed_variants():
                model = load_model(self.runner.input_path("train", f"{MODELS_DIR}/{variant.value}.json"))
                holdout = evaluate(model, test_fm)
                summary = repeated_trials(
                    variant,
                    fm,
                    n=cfg.evaluation.n_trials,
                    master_seed=cfg.master_seed,
                    hyper=cfg.models.hyperparams,
                    train_fraction=cfg.evaluation.train_fraction,
                    stratified=cfg.evaluation.stratified,
                )
                summaries[variant] = summary
                entries[variant.value] = {**summary.to_dict(), "holdout": holdout.to_dict()}
                if cfg.io.plot:
                    figure = self._path(f"{PLOTS_DIR}/confusion_{variant.value}.svg")
                    outputs.append(plots.plot_confusion(holdout, figure))

            best = max(summaries, key=lambda v: summaries[v].mean)
            outputs.append(
                write_report(
                    self._path(f"{REPORTS_DIR}/evaluation.json"),
                    "evaluation",
                    {
                        "bank": self.config.bank.value,
                        "features": list(fm.feature_names),
                        "n_rows": fm.n_rows,
                        "n_trials": cfg.evaluation.n_trials,
                        "master_seed": cfg.master_seed,
                        "variants": entries,
                        "best_variant": best.value,
                    },
                )
            )
            self.runner.record("eval", outputs)
        logger.info(f"✅ Best classifier: {best.value} ({summaries[best].mean:.4f})")
        return summaries, best

    def importance(self, all_variants: Optional[bool] = None) -> Dict[ModelVariant, ImportanceReport]:
        """Permutation importance on the held-out split for the best (or every) variant."""
        cfg = self.config
        all_variants = cfg.evaluation.all_importance if all_variants is None else all_variants
        with self.runner.stage("importance"):
            evaluation = read_report(self.runner.input_path("eval", f"{REPORTS_DIR}/evaluation.json"), "evaluation")
            test_fm = read_feature_matrix(self.runner.input_path("train", TEST_CSV))
            variants = (
                [ModelVariant.parse(v) for v in evaluation["variants"]]
                if all_variants
                else [ModelVariant.parse(evaluation["best_variant"])]
            )
            reports: Dict[ModelVariant, ImportanceReport] = {}
            outputs: List[Path] = []
            seed = streams.child_seed(cfg.master_seed, streams.PERMUTE)
            for variant in variants:
                model = load_model(self.runner.input_path("train", f"{MODELS_DIR}/{variant.value}.json"))
                report = permutation_importance(
                    model, test_fm, repeats=cfg.evaluation.importance_repeats, seed=seed, workers=cfg.dataset.workers
                )
                reports[variant] = report
                outputs.append(
                    write_report(
                        self._path(f"{REPORTS_DIR}/importance_{variant.value}.json"),
                        "importance",
                        {"variant": variant.value, **report.to_dict()},
                    )
                )
                csv_path = self._path(f"{REPORTS_DIR}/importance_{variant.value}.csv")
                report.to_frame().to_csv(csv_path, index=False, lineterminator="\n")
                outputs.append(csv_path)
                if cfg.io.plot:
                    figure = self._path(f"{PLOTS_DIR}/importance_{variant.value}.svg")
                    outputs.append(
                        plots.plot_importance(report, figure, f"Permutation importance - {variant.value}")
                    )
            self.runner.record("importance", outputs)
        return reports

    def run(self, source: Optional[Path] = None, schema: Optional[IngestSchema] = None) -> PipelineResult:
        """Every stage in order; ``source`` replaces synthesis with an ingested capture."""
        if source is not None:
            self.ingest(source, schema)
        else:
            self.synthesize()
        self.denoise()
        self.extract_features()
        _, selection = self.select()
        self.train_models()
        summaries, best = self.evaluate_models()
        importance = self.importance()
        return PipelineResult(selection=selection, summaries=summaries, best=best, importance=importance)

    def sweep(self) -> Dict[str, Any]:
        """Severity sweep: one trial per damage size level, then selection and repeated trials."""
        cfg = self.config
        with self.runner.stage("sweep"):
            dataset = build_severity_sweep(
                cfg.scenarios.resolve(),
                cfg.sweep.levels,
                cfg.noise,
                excitation=cfg.excitation,
                min_size=cfg.sweep.min_size,
                max_size=cfg.sweep.max_size,
            )
            denoised = self._denoise_all(dataset)
            fm = build_feature_matrix(
                denoised,
                cfg.dataset.baseline_path,
                cfg.bank,
                workers=cfg.dataset.workers,
                printed_sf4=cfg.features.printed_sf4,
            )
            selected, selection = filter_features(fm, cfg.selection.threshold)
            variant = ModelVariant.parse(cfg.sweep.variant)
            summary = repeated_trials(
                variant,
                selected,
                n=cfg.evaluation.n_trials,
                master_seed=streams.child_seed(cfg.master_seed, streams.SWEEP),
                hyper=cfg.models.hyperparams,
                train_fraction=cfg.evaluation.train_fraction,
                stratified=cfg.evaluation.stratified,
            )
            payload = {
                "bank": cfg.bank.value,
                "levels": cfg.sweep.levels,
                "sizes": np.linspace(cfg.sweep.min_size, cfg.sweep.max_size, cfg.sweep.levels).tolist(),
                "severities": severity_levels(cfg.sweep.levels, cfg.sweep.min_size, cfg.sweep.max_size).tolist(),
                "n_rows": fm.n_rows,
                "selection": selection.to_dict(),
                "evaluation": summary.to_dict(),
            }
            self.runner.record(
                "sweep",
                [
                    write_feature_matrix(fm, self._path(f"{SWEEP_DIR}/features.csv")),
                    write_report(self._path(f"{REPORTS_DIR}/sweep.json"), "sweep", payload),
                ],
            )
        logger.info(f"✅ Severity sweep accuracy ({variant.value}): {summary.mean:.4f} ± {summary.std:.4f}")
        return payload
