"""Stage bookkeeping for a run directory: timings, outputs, error context."""
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Iterator, List, Tuple

from src.storage.manifest import RunManifest
from src.utils.exceptions import GWDamageError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

DATASET_STAGES = ("synth", "ingest")
# Each stage reads only outputs of stages listed before it.
STAGE_ORDER = DATASET_STAGES + ("denoise", "features", "select", "train", "eval", "importance")

def downstream(name: str) -> Tuple[str, ...]:
    """``name`` and every stage whose outputs depend on it."""
    if name in DATASET_STAGES:
        return STAGE_ORDER
    if name not in STAGE_ORDER:
        return (name,)
    return STAGE_ORDER[STAGE_ORDER.index(name) :]

class StageRunner:
    """Runs named stages against one output directory and its manifest."""

    def __init__(self, out_dir: Path, config_hash: str):
        self.out_dir = out_dir
        self.config_hash = config_hash
        self.manifest = self._open_manifest()
        self.completed: List[str] = []

    def _open_manifest(self) -> RunManifest:
        try:
            manifest = RunManifest.load(self.out_dir)
        except GWDamageError:
            return RunManifest(config_hash=self.config_hash)
        if manifest.config_hash != self.config_hash:
            logger.warning(
                f"⚠️ {self.out_dir} was produced with config {manifest.config_hash[:12]}, "
                f"now running {self.config_hash[:12]}; earlier stages are kept"
            )
            manifest.config_hash = self.config_hash
        return manifest

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        """Time the block; failures carry ``[stage <name>]`` in their message."""
        logger.info(f"▶️ Stage '{name}' started")
        self.invalidate(name)
        start = time.perf_counter()
        try:
            yield
        except GWDamageError as e:
            logger.error(f"Stage '{name}' failed: {e}")
            e.args = (f"[stage {name}] {e}",)
            raise
        except Exception as e:
            logger.error(f"Stage '{name}' failed unexpectedly: {e}")
            raise GWDamageError(f"[stage {name}] {type(e).__name__}: {e}") from e
        elapsed = time.perf_counter() - start
        self.manifest.record(name, [], self.out_dir, seconds=elapsed)
        self.completed.append(name)
        self.manifest.save(self.out_dir)
        logger.info(f"✅ Stage '{name}' finished in {elapsed:.2f}s")

    def invalidate(self, name: str) -> None:
        """Forget ``name`` and every stage built on it."""
        stale = [s for s in downstream(name) if self.manifest.stages.pop(s, None) is not None]
        if stale:
            self.manifest.save(self.out_dir)
        if [s for s in stale if s != name]:
            logger.info(f"🧹 Stage '{name}' invalidates {stale}")

    def record(self, name: str, paths: Iterable[Path]) -> None:
        self.manifest.record(name, list(paths), self.out_dir)

    def input_path(self, stage: str, suffix: str) -> Path:
        """Output of an earlier stage, checked against the hash the manifest recorded."""
        relative = self.manifest.find(stage, suffix)
        self.manifest.verify(self.out_dir, stage)
        return self.out_dir / relative

    def has(self, stage: str) -> bool:
        return stage in self.manifest.stages
