"""
Run directory layout.

    <run>/manifest.json
    <run>/metrics/<target>_seed<seed>.jsonl
    <run>/checkpoints/<target>_seed<seed>_step<step>.pt
    <run>/result.json
    <run>/train.log
"""

from __future__ import annotations

import json
import logging
from datetime import datetime
from pathlib import Path

from models import DatasetError, RunManifest, RunResult

from utils import get_output_root

logger = logging.getLogger(__name__)

MANIFEST_FILENAME = "manifest.json"
RESULT_FILENAME = "result.json"
LOG_FILENAME = "train.log"


class RunDirectory:
    def __init__(self, root: Path) -> None:
        self.root = Path(root)

    @classmethod
    def create(cls, root: Path | None = None, variant: str = "run") -> "RunDirectory":
        """Use root as given, or a fresh timestamped directory under the output root."""
        if root is None:
            stamp = datetime.now().strftime("%Y%m%d_%H%M%S_%f")
            root = get_output_root() / f"{stamp}_{variant}"
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        return cls(root)

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_FILENAME

    @property
    def result_path(self) -> Path:
        return self.root / RESULT_FILENAME

    @property
    def log_path(self) -> Path:
        return self.root / LOG_FILENAME

    def metrics_path(self, target: str, seed: int) -> Path:
        return self.root / "metrics" / f"{target}_seed{seed}.jsonl"

    def checkpoint_path(self, target: str, seed: int, step: int) -> Path:
        return self.root / "checkpoints" / f"{target}_seed{seed}_step{step}.pt"

    def write_manifest(self, manifest: RunManifest) -> Path:
        _write_json(self.manifest_path, manifest.to_dict(encode_json=True))
        return self.manifest_path

    def read_manifest(self) -> RunManifest:
        return read_manifest(self.manifest_path)

    def write_result(self, result: RunResult) -> Path:
        _write_json(self.result_path, result.to_dict(encode_json=True))
        return self.result_path

    def read_result(self) -> RunResult:
        return read_result(self.result_path)


def _write_json(path: Path, payload: dict) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise DatasetError("cannot write run file", path=str(path)) from exc


def _read_json(path: Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetError("cannot read run file", path=str(path)) from exc


def read_manifest(path: Path) -> RunManifest:
    return RunManifest.from_dict(_read_json(path))


def read_result(path: Path) -> RunResult:
    """Accepts either a result.json file or a run directory containing one."""
    path = Path(path)
    if path.is_dir():
        path = path / RESULT_FILENAME
    return RunResult.from_dict(_read_json(path))
