"""
Seeded mini-batch iteration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import torch
from torch.nn import functional as F

from models import ConfigurationError, DatasetError
from utils import make_generator

from .datasets import Sample


@dataclass(slots=True)
class Batch:
    images: torch.Tensor
    onehot: torch.Tensor
    labels: torch.Tensor
    sample_ids: tuple[str, ...]

    def __len__(self) -> int:
        return self.images.shape[0]


def stack_samples(samples: Sequence[Sample], num_classes: int) -> Batch:
    labels = torch.tensor([s.label for s in samples], dtype=torch.long)
    return Batch(
        images=torch.stack([s.image for s in samples]),
        onehot=F.one_hot(labels, num_classes).to(torch.float32),
        labels=labels,
        sample_ids=tuple(s.sample_id for s in samples),
    )


def batches(
    samples: Sequence[Sample],
    batch_size: int,
    epoch_seed: int,
    num_classes: int,
) -> Iterator[Batch]:
    """One epoch in a seeded order; the last partial batch is kept."""
    if batch_size < 1:
        raise ConfigurationError(f"batch_size must be >= 1, got {batch_size}")
    if len(samples) == 0:
        raise DatasetError("cannot batch an empty sample set")
    order = torch.randperm(len(samples), generator=make_generator(epoch_seed)).tolist()
    for start in range(0, len(order), batch_size):
        yield stack_samples([samples[i] for i in order[start:start + batch_size]], num_classes)


def sequential_batches(samples: Sequence[Sample], batch_size: int, num_classes: int) -> Iterator[Batch]:
    """Fixed-order batches for evaluation."""
    items = list(samples)
    for start in range(0, len(items), batch_size):
        yield stack_samples(items[start:start + batch_size], num_classes)
