"""
Noise corruptions used to build an out-of-distribution domain.

gaussian: x + N(0, sigma^2)
impulse:  each pixel set to 0 or 1 with probability p/2 each
speckle:  x * (1 + N(0, sigma^2))
shot:     Poisson(x * s) / s
All results are clamped to [0, 1].
"""

from __future__ import annotations

import logging
from collections import Counter
from typing import Sequence

import torch

from models import ConfigurationError, DatasetError, NoiseSpec
from utils import derive_seed, make_generator

from .datasets import MultiDomainDataset, Sample

logger = logging.getLogger(__name__)


def corrupt_images(images: torch.Tensor, spec: NoiseSpec, generator: torch.Generator) -> torch.Tensor:
    """Corrupt one image or a batch; the input tensor is not modified."""
    spec.validate()
    value = spec.resolved_param
    if spec.kind == "gaussian":
        out = images + value * torch.randn(images.shape, generator=generator, dtype=images.dtype)
    elif spec.kind == "speckle":
        out = images * (1.0 + value * torch.randn(images.shape, generator=generator, dtype=images.dtype))
    elif spec.kind == "impulse":
        u = torch.rand(images.shape, generator=generator, dtype=images.dtype)
        out = torch.where(u < value / 2, torch.zeros_like(images), images)
        out = torch.where(u >= 1.0 - value / 2, torch.ones_like(images), out)
    else:
        out = torch.poisson(images * value, generator=generator) / value
    return out.clamp(0.0, 1.0)


def corrupt(
    dataset: MultiDomainDataset,
    specs: NoiseSpec | Sequence[NoiseSpec],
    *,
    assign_seed: int = 0,
    domain_suffix: str | None = None,
) -> MultiDomainDataset:
    """
    Append one corrupted copy of every domain as a new domain.

    With several specs each image receives exactly one of them, chosen by a
    generator seeded with assign_seed. Labels and sample counts are preserved
    and the source domains are left untouched.
    """
    specs = [specs] if isinstance(specs, NoiseSpec) else list(specs)
    if not specs:
        raise ConfigurationError("at least one noise spec is required")
    for spec in specs:
        spec.validate()
    suffix = domain_suffix or (specs[0].kind if len(specs) == 1 else "noisy")

    chooser = make_generator(assign_seed)
    new_domains = []
    new_samples: list[Sample] = []
    used = Counter()
    for domain in dataset.domains:
        name = f"{domain}_{suffix}"
        if name in dataset.domains:
            raise DatasetError(f"corrupted domain name {name!r} already exists")
        new_domains.append(name)
        for sample in dataset.domain_samples(domain):
            spec = specs[int(torch.randint(len(specs), (1,), generator=chooser).item())]
            used[spec.kind] += 1
            generator = make_generator(derive_seed(spec.seed, spec.kind, sample.sample_id))
            image = corrupt_images(sample.image, spec, generator)
            sample_id = f"{name}/{sample.sample_id.split('/', 1)[-1]}"
            new_samples.append(Sample(image=image, label=sample.label, domain=name, sample_id=sample_id))

    logger.info("corrupted %d images (%s)", len(new_samples), dict(sorted(used.items())))
    return dataset.with_domains(new_samples, new_domains)
