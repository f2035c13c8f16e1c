"""Command-line interface: one subcommand per pipeline stage."""
import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from src.cli.ingest import IngestSchema
from src.config.settings import PipelineConfig
from src.core.pipeline import DamagePipeline
from src.interpret.permutation import ImportanceReport
from src.models.base import ModelVariant
from src.models.training import TrialSummary
from src.utils.exceptions import GWDamageError
from src.utils.log_config import configure_logging, get_logger

logger = get_logger(__name__)

COMMANDS = ("synth", "ingest", "denoise", "features", "select", "train", "eval", "importance", "pipeline", "sweep")

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration file")
    common.add_argument("--seed", type=int, help="master seed (overrides config and GW_MASTER_SEED)")
    common.add_argument("--out", help="run directory (overrides config and GW_OUT_DIR)")
    common.add_argument("--bank", choices=["baseline", "baseline-free"], help="feature bank")
    common.add_argument("--plot", action="store_true", help="also write SVG figures")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("-v", "--verbose", action="store_true", help="same as --log-level DEBUG")
    return common

def _schema_options(parser: argparse.ArgumentParser) -> None:
    defaults = IngestSchema()
    parser.add_argument("--time-column", default=defaults.time_column)
    parser.add_argument("--amplitude-column", default=defaults.amplitude_column)
    parser.add_argument("--label-column", default=defaults.label_column)
    parser.add_argument("--series-column", default=defaults.series_column)

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwdamage",
        description="Guided-wave damage classification: synthesize or ingest signals, "
        "extract and select features, train and interpret classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    helps = {
        "synth": "synthesize the surrogate dataset",
        "ingest": "import a capture CSV (time, amplitude, label[, series_id])",
        "denoise": "offset removal and wavelet band reconstruction",
        "features": "build the feature matrix",
        "select": "correlation-filter the feature matrix",
        "train": "fit every configured classifier on the first split",
        "eval": "held-out and repeated-split evaluation",
        "importance": "permutation importance of the best classifier",
        "pipeline": "run every stage in order",
        "sweep": "severity sweep over damage sizes",
    }
    commands: Dict[str, argparse.ArgumentParser] = {
        name: sub.add_parser(name, parents=[common], help=helps[name]) for name in COMMANDS
    }
    commands["ingest"].add_argument("path", type=Path, help="capture CSV file")
    _schema_options(commands["ingest"])
    commands["pipeline"].add_argument("--input", type=Path, help="capture CSV to ingest instead of synthesizing")
    _schema_options(commands["pipeline"])
    for name in ("importance", "pipeline"):
        commands[name].add_argument(
            "--all-importance", action="store_true", help="importance for every classifier, not only the best"
        )
    return parser

def _schema(args: argparse.Namespace) -> IngestSchema:
    return IngestSchema(
        time_column=args.time_column,
        amplitude_column=args.amplitude_column,
        label_column=args.label_column,
        series_column=args.series_column,
    )

def _print_evaluation(summaries: Dict[ModelVariant, TrialSummary], best: ModelVariant) -> None:
    for variant, summary in summaries.items():
        marker = "🏆" if variant is best else "  "
        print(f"{marker} {variant.value:<14} accuracy {summary.mean:.4f} ± {summary.std:.4f}")

def _print_importance(reports: Dict[ModelVariant, ImportanceReport]) -> None:
    for variant, report in reports.items():
        print(f"📊 {variant.value} importance (baseline accuracy {report.baseline_accuracy:.4f}):")
        for name in report.ranking():
            entry = report.entry(name)
            print(f"   {name:<8} {entry.mean_drop:+.4f} ± {entry.std_drop:.4f}")

def _handlers(args: argparse.Namespace, pipeline: DamagePipeline) -> Dict[str, Callable[[], None]]:
    def synth() -> None:
        print(f"✅ Synthesized {len(pipeline.synthesize())} series into {pipeline.out_dir}")

    def ingest() -> None:
        print(f"✅ Ingested {len(pipeline.ingest(args.path, _schema(args)))} series into {pipeline.out_dir}")

    def denoise() -> None:
        print(f"✅ Denoised {len(pipeline.denoise())} series")

    def features() -> None:
        fm = pipeline.extract_features()
        print(f"✅ Feature matrix {fm.n_rows} x {fm.n_features} ({pipeline.config.bank.value})")

    def select() -> None:
        _, report = pipeline.select()
        print(f"✅ Kept {report.kept}; dropped {[d.feature for d in report.dropped]}")

    def train() -> None:
        print(f"✅ Trained {[v.value for v in pipeline.train_models()]}")

    def pipeline_all() -> None:
        result = pipeline.run(args.input, _schema(args))
        print(f"✅ Kept {result.selection.kept}; dropped {[d.feature for d in result.selection.dropped]}")
        _print_evaluation(result.summaries, result.best)
        _print_importance(result.importance)

    def sweep() -> None:
        payload = pipeline.sweep()
        evaluation = payload["evaluation"]
        print(
            f"✅ Severity sweep ({payload['levels']} levels, {payload['n_rows']} rows): "
            f"{evaluation['variant']} accuracy {evaluation['mean_accuracy']:.4f} ± {evaluation['std_accuracy']:.4f}"
        )

    return {
        "synth": synth,
        "ingest": ingest,
        "denoise": denoise,
        "features": features,
        "select": select,
        "train": train,
        "eval": lambda: _print_evaluation(*pipeline.evaluate_models()),
        "importance": lambda: _print_importance(pipeline.importance()),
        "pipeline": pipeline_all,
        "sweep": sweep,
    }

def run(argv: Optional[List[str]] = None) -> None:
    """Parse ``argv`` and execute the subcommand; errors propagate."""
    args = build_parser().parse_args(argv)
    level = "DEBUG" if args.verbose else args.log_level
    if level:
        configure_logging(level)
    config = PipelineConfig.create(args.config, seed=args.seed, out_dir=args.out, bank=args.bank)
    config.io.plot = config.io.plot or args.plot
    if getattr(args, "all_importance", False):
        config.evaluation.all_importance = True
    pipeline = DamagePipeline(config)
    _handlers(args, pipeline)[args.command]()

def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and map failures to exit codes (2 config, 3 data, 4 numeric, 1 other)."""
    try:
        run(argv)
    except GWDamageError as e:
        logger.error(f"Application error: {e}")
        print(f"❌ Error: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        return 130
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        print(f"❌ Unexpected error: {e}", file=sys.stderr)
        return 1
    return 0
