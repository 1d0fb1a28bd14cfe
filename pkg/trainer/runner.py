"""
Leave-one-domain-out protocol over every target domain and seed.

Runs are independent, so they can be fanned out across worker processes;
each worker trains single-threaded and results are always ordered by
(target, seed) position, never by completion time.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from augment import AugmentPolicy, default_policy
from data import MultiDomainDataset, build_protocol
from models import BackboneConfig, DatasetError, RunResult, SeedResult, TargetResult, TrainConfig
from utils import enable_determinism

from .fit import fit
from .run_dir import RunDirectory
from .step import AugmentedPath

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunJob:
    dataset: MultiDomainDataset
    target: str
    seed: int
    backbone: BackboneConfig
    config: TrainConfig
    policy: AugmentPolicy
    run_dir: Optional[RunDirectory]
    path: AugmentedPath = AugmentedPath.NO_GRAD


def run_job(job: RunJob) -> SeedResult:
    """Split with the run seed, then fit; the split seed equals the training seed."""
    split = build_protocol(job.dataset, job.target, split_seed=job.seed)
    return fit(split, job.backbone, job.config, job.seed, policy=job.policy, run_dir=job.run_dir, path=job.path)


def _worker_job(job: RunJob) -> SeedResult:
    enable_determinism(threads=1)
    return run_job(job)


def run_protocol(
    dataset: MultiDomainDataset,
    config: TrainConfig,
    backbone: Optional[BackboneConfig] = None,
    *,
    policy: Optional[AugmentPolicy] = None,
    run_dir: Optional[RunDirectory] = None,
    targets: Optional[Sequence[str]] = None,
    workers: int = 1,
    path: AugmentedPath = AugmentedPath.NO_GRAD,
) -> RunResult:
    config.validate()
    if len(dataset.domains) < 2:
        raise DatasetError("leave-one-domain-out needs at least 2 domains")
    backbone = backbone or BackboneConfig(image_size=dataset.image_size, in_channels=dataset.in_channels)
    policy = policy or default_policy()
    targets = list(targets) if targets else list(dataset.domains)
    for target in targets:
        if target not in dataset.domains:
            raise DatasetError(f"unknown target domain {target!r}")

    jobs = [
        RunJob(dataset, target, seed, backbone, config, policy, run_dir, path)
        for target in targets
        for seed in config.seeds
    ]
    logger.info(
        "running %s: %d targets x %d seeds (%d workers)",
        config.variant.value,
        len(targets),
        len(config.seeds),
        workers,
    )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker_job, jobs))
    else:
        results = [run_job(job) for job in jobs]

    per_target = []
    n_seeds = len(config.seeds)
    for index, target in enumerate(targets):
        seeds = results[index * n_seeds:(index + 1) * n_seeds]
        per_target.append(TargetResult.from_seeds(target, seeds))
    result = RunResult.from_targets(config.variant, per_target)
    logger.info("%s average target accuracy %.4f", config.variant.value, result.average)
    return result
