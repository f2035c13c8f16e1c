"""Run manifest: config hash, input hash, per-stage outputs and timings."""
import hashlib
import json
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional

import matplotlib
import mpmath
import numpy as np
import pandas as pd
import pywt
import scipy

from src.utils.exceptions import DataError

MANIFEST_FILE = "manifest.json"
MANIFEST_SCHEMA_VERSION = 1

def blob_hash(data: bytes) -> str:
    """Git-style object id of a file's content."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()

def content_hash(paths: Iterable[Path], root: Optional[Path] = None) -> str:
    """Order-independent hash over (relative name, blob hash) of ``paths``."""
    digest = hashlib.sha256()
    entries = []
    for path in paths:
        name = str(path.relative_to(root)) if root else path.name
        entries.append((name, blob_hash(path.read_bytes())))
    for name, blob in sorted(entries):
        digest.update(f"{name}\0{blob}\n".encode("utf-8"))
    return digest.hexdigest()

def library_versions() -> Dict[str, str]:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pywt": pywt.__version__,
        "mpmath": mpmath.__version__,
        "pandas": pd.__version__,
        "matplotlib": matplotlib.__version__,
    }

@dataclass
class StageEntry:
    outputs: Dict[str, str] = field(default_factory=dict)  # relative path -> blob hash
    seconds: float = 0.0

@dataclass
class RunManifest:
    """Everything a run produced; timings are the only non-reproducible field."""
    config_hash: str
    input_hash: str = ""
    stages: Dict[str, StageEntry] = field(default_factory=dict)
    versions: Dict[str, str] = field(default_factory=library_versions)

    def record(self, stage: str, paths: Iterable[Path], root: Path, seconds: float = 0.0) -> None:
        entry = self.stages.setdefault(stage, StageEntry())
        for path in paths:
            entry.outputs[str(path.relative_to(root))] = blob_hash(path.read_bytes())
        entry.seconds += seconds

    def outputs(self, stage: str) -> List[str]:
        if stage not in self.stages:
            raise DataError(f"manifest has no outputs for stage '{stage}'; run it first")
        return sorted(self.stages[stage].outputs)

    def find(self, stage: str, suffix: str) -> str:
        """The single output of ``stage`` whose path ends with ``suffix``."""
        matches = [p for p in self.outputs(stage) if p.endswith(suffix)]
        if len(matches) != 1:
            raise DataError(f"expected one '{suffix}' output from stage '{stage}', found {len(matches)}")
        return matches[0]

    def to_dict(self) -> Dict[str, object]:
        return {
            "schema_version": MANIFEST_SCHEMA_VERSION,
            "config_hash": self.config_hash,
            "input_hash": self.input_hash,
            "versions": self.versions,
            "stages": {
                name: {"outputs": dict(sorted(e.outputs.items())), "seconds": round(e.seconds, 6)}
                for name, e in self.stages.items()
            },
        }

    def save(self, directory: Path) -> Path:
        path = directory / MANIFEST_FILE
        directory.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, directory: Path) -> "RunManifest":
        path = directory / MANIFEST_FILE
        if not path.exists():
            raise DataError(f"no {MANIFEST_FILE} in {directory}")
        document = json.loads(path.read_text(encoding="utf-8"))
        if document.get("schema_version") != MANIFEST_SCHEMA_VERSION:
            raise DataError(f"{path}: unsupported manifest schema_version {document.get('schema_version')}")
        stages = {
            name: StageEntry(outputs=dict(entry["outputs"]), seconds=float(entry["seconds"]))
            for name, entry in document["stages"].items()
        }
        return cls(
            config_hash=document["config_hash"],
            input_hash=document.get("input_hash", ""),
            stages=stages,
            versions=dict(document.get("versions", {})),
        )

    def verify(self, directory: Path, stage: str) -> None:
        """Fail if any recorded output of ``stage`` changed on disk."""
        for rel, expected in self.stages[stage].outputs.items():
            path = directory / rel
            if not path.exists():
                raise DataError(f"manifest lists missing file {rel}")
            if blob_hash(path.read_bytes()) != expected:
                raise DataError(f"{rel} changed since stage '{stage}' wrote it")
