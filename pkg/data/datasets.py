"""
Multi-domain image datasets and the on-disk image-folder layout
`root/<domain>/<class>/<image>`.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import torch
import torchvision.transforms.functional as TF
from PIL import Image, UnidentifiedImageError

from models import DatasetError

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")


@dataclass(frozen=True, eq=False)
class Sample:
    image: torch.Tensor
    label: int
    domain: str
    sample_id: str


@dataclass(frozen=True, eq=False)
class MultiDomainDataset:
    classes: tuple[str, ...]
    domains: tuple[str, ...]
    samples: tuple[Sample, ...]
    image_size: int
    in_channels: int
    _by_domain: dict[str, tuple[Sample, ...]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if len(set(self.domains)) != len(self.domains):
            raise DatasetError(f"domain names must be unique: {list(self.domains)}")
        if len(self.classes) < 2:
            raise DatasetError("a dataset needs at least two classes")
        expected = (self.in_channels, self.image_size, self.image_size)
        ids = set()
        grouped: dict[str, list[Sample]] = {name: [] for name in self.domains}
        for sample in self.samples:
            if sample.domain not in grouped:
                raise DatasetError(f"sample {sample.sample_id} belongs to unknown domain {sample.domain!r}")
            if not 0 <= sample.label < len(self.classes):
                raise DatasetError(f"sample {sample.sample_id} has label {sample.label} outside the class vocabulary")
            if tuple(sample.image.shape) != expected:
                raise DatasetError(
                    f"sample {sample.sample_id} has shape {tuple(sample.image.shape)}, expected {expected}"
                )
            if sample.sample_id in ids:
                raise DatasetError(f"duplicate sample id {sample.sample_id}")
            ids.add(sample.sample_id)
            grouped[sample.domain].append(sample)
        object.__setattr__(self, "_by_domain", {k: tuple(v) for k, v in grouped.items()})

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def domain_samples(self, name: str) -> tuple[Sample, ...]:
        if name not in self._by_domain:
            raise DatasetError(f"unknown domain {name!r}; available: {', '.join(self.domains)}")
        return self._by_domain[name]

    def label_histogram(self, domain: str) -> dict[int, int]:
        return dict(sorted(Counter(s.label for s in self.domain_samples(domain)).items()))

    def with_domains(self, extra: Iterable[Sample], names: Sequence[str]) -> "MultiDomainDataset":
        """New dataset with additional domains appended."""
        return MultiDomainDataset(
            classes=self.classes,
            domains=self.domains + tuple(names),
            samples=self.samples + tuple(extra),
            image_size=self.image_size,
            in_channels=self.in_channels,
        )


def _list_dirs(path: Path) -> list[Path]:
    return sorted(p for p in path.iterdir() if p.is_dir())


def _read_image(path: Path, image_size: int, in_channels: int) -> torch.Tensor:
    mode = "RGB" if in_channels == 3 else "L"
    try:
        with Image.open(path) as handle:
            image = handle.convert(mode)
            if image.size != (image_size, image_size):
                image = image.resize((image_size, image_size), Image.Resampling.BILINEAR)
            tensor = TF.pil_to_tensor(image)
    except (UnidentifiedImageError, OSError) as exc:
        raise DatasetError("unreadable image file", path=str(path)) from exc
    return tensor.to(torch.float32) / 255.0


def load_image_folder(
    root: Path,
    image_size: int,
    in_channels: int = 3,
    min_domains: int = 2,
) -> MultiDomainDataset:
    """
    Load `root/<domain>/<class>/<image>` into memory.

    Images are resized to image_size and scaled to [0, 1]; samples are ordered
    by lexicographic path so repeated loads agree.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError("dataset directory does not exist", path=str(root))

    domain_dirs = _list_dirs(root)
    if len(domain_dirs) < min_domains:
        raise DatasetError(f"expected at least {min_domains} domain directories", path=str(root))

    class_sets = {d.name: [c.name for c in _list_dirs(d)] for d in domain_dirs}
    all_classes = sorted(set().union(*class_sets.values()))
    missing = {
        domain: sorted(set(all_classes) - set(names))
        for domain, names in class_sets.items()
        if set(names) != set(all_classes)
    }
    if missing:
        detail = "; ".join(f"{d} lacks {', '.join(m)}" for d, m in sorted(missing.items()))
        raise DatasetError(f"class vocabulary differs across domains: {detail}", path=str(root))
    if len(all_classes) < 2:
        raise DatasetError("expected at least two shared classes", path=str(root))

    samples = []
    for domain_dir in domain_dirs:
        for label, class_name in enumerate(all_classes):
            files = sorted(
                p for p in (domain_dir / class_name).iterdir()
                if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
            )
            for path in files:
                samples.append(
                    Sample(
                        image=_read_image(path, image_size, in_channels),
                        label=label,
                        domain=domain_dir.name,
                        sample_id=path.relative_to(root).as_posix(),
                    )
                )
    logger.info("loaded %d images from %d domains under %s", len(samples), len(domain_dirs), root)
    return MultiDomainDataset(
        classes=tuple(all_classes),
        domains=tuple(d.name for d in domain_dirs),
        samples=tuple(samples),
        image_size=image_size,
        in_channels=in_channels,
    )


def export_image_folder(dataset: MultiDomainDataset, root: Path) -> list[Path]:
    """Write every sample as an 8-bit PNG under root/<domain>/<class>/."""
    root = Path(root)
    written = []
    for sample in dataset.samples:
        path = root / sample.domain / dataset.classes[sample.label] / f"{Path(sample.sample_id).stem}.png"
        pixels = (sample.image * 255.0).round().clamp(0, 255).to(torch.uint8)
        image = TF.to_pil_image(pixels)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            image.save(path, format="PNG")
        except OSError as exc:
            raise DatasetError("cannot write image", path=str(path)) from exc
        written.append(path)
    logger.info("exported %d images to %s", len(written), root)
    return written
