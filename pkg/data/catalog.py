"""
dataset.json: what an image-folder dataset holds and how it was produced.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from dataclasses_json import dataclass_json

from config import SCHEMA_VERSION
from models import DatasetError, NoiseSpec
from utils import file_checksum

from .datasets import MultiDomainDataset
from .synthetic import SyntheticConfig

logger = logging.getLogger(__name__)

CATALOG_FILENAME = "dataset.json"


@dataclass_json
@dataclass
class DatasetCatalog:
    image_size: int
    in_channels: int
    classes: List[str]
    domains: List[str]
    counts: Dict[str, int]
    files: Dict[str, str] = field(default_factory=dict)
    generator: Optional[SyntheticConfig] = None
    noise_specs: List[NoiseSpec] = field(default_factory=list)
    source: Optional[str] = None
    assign_seed: Optional[int] = None
    schema_version: str = SCHEMA_VERSION

    @property
    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for name, checksum in sorted(self.files.items()):
            digest.update(f"{name}:{checksum}\n".encode("utf-8"))
        return digest.hexdigest()


def build_catalog(
    dataset: MultiDomainDataset,
    root: Path,
    written: List[Path],
    **extra,
) -> DatasetCatalog:
    root = Path(root)
    return DatasetCatalog(
        image_size=dataset.image_size,
        in_channels=dataset.in_channels,
        classes=list(dataset.classes),
        domains=list(dataset.domains),
        counts={d: len(dataset.domain_samples(d)) for d in dataset.domains},
        files={p.relative_to(root).as_posix(): file_checksum(p) for p in sorted(written)},
        **extra,
    )


def write_catalog(catalog: DatasetCatalog, root: Path) -> Path:
    path = Path(root) / CATALOG_FILENAME
    try:
        path.write_text(json.dumps(catalog.to_dict(encode_json=True), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise DatasetError("cannot write dataset catalog", path=str(path)) from exc
    return path


def read_catalog(root: Path) -> Optional[DatasetCatalog]:
    """The catalog of a dataset directory, or None when it has none."""
    path = Path(root) / CATALOG_FILENAME
    if not path.is_file():
        return None
    try:
        return DatasetCatalog.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (OSError, ValueError, KeyError) as exc:
        raise DatasetError("cannot read dataset catalog", path=str(path)) from exc
