"""JSON report documents."""
import json
from pathlib import Path
from typing import Any, Dict

from src.utils.exceptions import DataError

REPORT_SCHEMA_VERSION = 1

def dumps(payload: Dict[str, Any]) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"

def write_report(path: Path, kind: str, payload: Dict[str, Any]) -> Path:
    document = {"schema_version": REPORT_SCHEMA_VERSION, "kind": kind, **payload}
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(dumps(document))
    return path

def read_report(path: Path, kind: str | None = None) -> Dict[str, Any]:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: invalid JSON ({e})") from e
    if document.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise DataError(f"{path}: unsupported schema_version {document.get('schema_version')}")
    if kind is not None and document.get("kind") != kind:
        raise DataError(f"{path}: expected a '{kind}' report, found '{document.get('kind')}'")
    return document
