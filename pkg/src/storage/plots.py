"""Static SVG figures: signals, confusion matrices, importance bars, correlations."""
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.core.types import CLASS_ORDER, TimeSeries  # noqa: E402
from src.interpret.permutation import ImportanceReport  # noqa: E402
from src.models.training import EvalReport  # noqa: E402
from src.selection.correlation import CorrelationMatrix  # noqa: E402
from src.utils.log_config import get_logger  # noqa: E402

logger = get_logger(__name__)

# Fixed metadata and hash salt keep SVG output byte-stable between runs.
_SVG_METADATA = {"Date": None, "Creator": None}
plt.rcParams["svg.hashsalt"] = "gwdamage"

def _save(fig: plt.Figure, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    logger.debug(f"Wrote figure {path}")
    return path

def plot_signals(series: Sequence[TimeSeries], path: Path, title: str = "Representative signals") -> Path:
    fig, ax = plt.subplots(figsize=(9, 4.5))
    for s in series:
        ax.plot(s.times * 1e6, s.samples, linewidth=0.8, label=s.meta.label.value)
    ax.set_xlabel("Time (µs)")
    ax.set_ylabel("Amplitude")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    return _save(fig, path)

def plot_confusion(report: EvalReport, path: Path) -> Path:
    names = [c.value for c in CLASS_ORDER]
    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.imshow(report.confusion, cmap="Blues")
    ax.set_xticks(range(len(names)), labels=names)
    ax.set_yticks(range(len(names)), labels=names)
    peak = report.confusion.max() or 1
    for i in range(len(names)):
        for j in range(len(names)):
            value = int(report.confusion[i, j])
            ax.text(j, i, str(value), ha="center", va="center", color="white" if value > peak / 2 else "black")
    variant = report.variant.value if report.variant else "model"
    ax.set_title(f"Confusion matrix - {variant} (accuracy {report.accuracy:.3f})")
    ax.set_xlabel("Predicted label")
    ax.set_ylabel("True label")
    return _save(fig, path)

def plot_importance(report: ImportanceReport, path: Path, title: str = "Permutation importance") -> Path:
    names = [e.feature for e in report.entries]
    means = np.array([e.mean_drop for e in report.entries])
    stds = np.array([e.std_drop for e in report.entries])
    fig, ax = plt.subplots(figsize=(7, 0.45 * len(names) + 1.5))
    ax.barh(names, means, xerr=stds, color="tab:blue")
    ax.invert_yaxis()
    ax.axvline(0.0, color="black", linewidth=0.6)
    ax.set_xlabel("Mean accuracy drop")
    ax.set_title(title)
    return _save(fig, path)

def plot_correlation(matrix: CorrelationMatrix, path: Path) -> Path:
    names = list(matrix.feature_names)
    fig, ax = plt.subplots(figsize=(0.5 * len(names) + 2.5, 0.5 * len(names) + 2))
    image = ax.imshow(np.nan_to_num(matrix.values, nan=0.0), cmap="coolwarm", vmin=-1, vmax=1)
    ax.set_xticks(range(len(names)), labels=names, rotation=90)
    ax.set_yticks(range(len(names)), labels=names)
    fig.colorbar(image, ax=ax, fraction=0.046)
    ax.set_title("Pearson correlation")
    return _save(fig, path)
