import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from . import __version__
from .exceptions import ReportError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1024 * 1024), b""):
            h.update(chunk)
    return h.hexdigest()


def to_jsonable(value: Any) -> Any:
    """Complex numbers become [re, im]; numpy scalars and arrays become Python types."""
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(to_jsonable(payload), f, indent=2, sort_keys=True)
            f.write("\n")
    except (OSError, TypeError) as e:
        raise ReportError(f"Failed to write {Path(path).name}: {e}")
    return Path(path)


@dataclass
class RunManifest:
    """Provenance record of one run: inputs, derived numbers and hashed outputs."""
    config: Dict[str, Any]
    version: str = __version__
    constants: Dict[str, Any] = field(default_factory=dict)
    eigenvalues: List[Any] = field(default_factory=list)
    poles: List[Any] = field(default_factory=list)
    windings: Dict[str, int] = field(default_factory=dict)
    checks: List[Dict[str, Any]] = field(default_factory=list)
    files: List[Dict[str, Any]] = field(default_factory=list)
    wall_clock_seconds: float = 0.0
    status: str = "ok"
    diagnostic: Optional[str] = None

    def add_file(self, path: Path, root: Path) -> None:
        """Record ``path`` (relative to ``root``) with its size and SHA-256."""
        path = Path(path)
        self.files.append(
            {
                "path": path.relative_to(root).as_posix(),
                "bytes": path.stat().st_size,
                "sha256": sha256_file(path),
            }
        )

    def add_check(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})

    def fail(self, diagnostic: str) -> None:
        self.status = "failed"
        self.diagnostic = diagnostic

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable(asdict(self))

    def write(self, output_dir: Path) -> Path:
        path = Path(output_dir) / MANIFEST_NAME
        write_json(path, self.to_dict())
        logger.debug("manifest written to %s (%d files)", path, len(self.files))
        return path


def verify_manifest(path: Path) -> List[str]:
    """Problems with a manifest: missing files or hash mismatches (empty when intact)."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise ReportError(f"Cannot read manifest {path}: {e}")
    root = path.parent
    problems = []
    for entry in data.get("files", []):
        target = root / entry["path"]
        if not target.exists():
            problems.append(f"missing: {entry['path']}")
        elif sha256_file(target) != entry["sha256"]:
            problems.append(f"hash mismatch: {entry['path']}")
    return problems
