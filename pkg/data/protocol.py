"""
Leave-one-domain-out protocol construction.

Each non-target domain is shuffled with the split seed and cut floor(80%) /
remainder into train and validation; the validation shards are merged into
one unified validation set and the whole target domain becomes the test set.
"""

from __future__ import annotations

import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator, Sequence, overload

import torch

from config import MIN_DOMAIN_SAMPLES, TRAIN_FRACTION
from models import DatasetError
from utils import derive_seed, make_generator

from .datasets import MultiDomainDataset, Sample

logger = logging.getLogger(__name__)


class TrackedSamples(Sequence[Sample]):
    """
    Read-only sample sequence that records which phase each read happened in.

    Used for the target domain so a run can prove no test sample was touched
    before the final evaluation.
    """

    def __init__(self, samples: Sequence[Sample], phase: str = "sealed") -> None:
        self._samples = tuple(samples)
        self.phase = phase
        self.reads: list[str] = []

    def __len__(self) -> int:
        return len(self._samples)

    @overload
    def __getitem__(self, index: int) -> Sample: ...

    @overload
    def __getitem__(self, index: slice) -> Sequence[Sample]: ...

    def __getitem__(self, index):
        self.reads.append(self.phase)
        return self._samples[index]

    def __iter__(self) -> Iterator[Sample]:
        self.reads.append(self.phase)
        return iter(self._samples)

    @contextmanager
    def reading(self, phase: str) -> Iterator["TrackedSamples"]:
        previous = self.phase
        self.phase = phase
        try:
            yield self
        finally:
            self.phase = previous

    def reads_outside(self, phase: str) -> list[str]:
        return [p for p in self.reads if p != phase]


@dataclass(frozen=True, eq=False)
class ProtocolSplit:
    target_domain: str
    train: tuple[Sample, ...]
    unified_val: tuple[Sample, ...]
    test: TrackedSamples
    num_classes: int
    source_domains: tuple[str, ...]


def train_count(n: int) -> int:
    return math.floor(TRAIN_FRACTION * n)


def build_protocol(dataset: MultiDomainDataset, target: str, split_seed: int) -> ProtocolSplit:
    if target not in dataset.domains:
        raise DatasetError(f"unknown target domain {target!r}; available: {', '.join(dataset.domains)}")
    sources = tuple(d for d in dataset.domains if d != target)
    if not sources:
        raise DatasetError("leave-one-domain-out needs at least one source domain")

    train: list[Sample] = []
    val: list[Sample] = []
    for domain in sources:
        samples = dataset.domain_samples(domain)
        if len(samples) < MIN_DOMAIN_SAMPLES:
            raise DatasetError(
                f"domain {domain!r} has {len(samples)} samples; at least {MIN_DOMAIN_SAMPLES} are required"
            )
        order = torch.randperm(len(samples), generator=make_generator(derive_seed(split_seed, "split", domain)))
        cut = train_count(len(samples))
        train.extend(samples[i] for i in order[:cut].tolist())
        val.extend(samples[i] for i in order[cut:].tolist())

    logger.debug(
        "protocol target=%s train=%d val=%d test=%d",
        target,
        len(train),
        len(val),
        len(dataset.domain_samples(target)),
    )
    return ProtocolSplit(
        target_domain=target,
        train=tuple(train),
        unified_val=tuple(val),
        test=TrackedSamples(dataset.domain_samples(target)),
        num_classes=dataset.num_classes,
        source_domains=sources,
    )
