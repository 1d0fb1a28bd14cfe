"""
Conversion helpers between result dataclasses and ORM models.
"""

from __future__ import annotations

import json
from typing import Optional

from models import RunManifest, RunResult, SeedResult, TargetResult, Variant

from . import models as orm


def seed_to_model(seed: SeedResult, position: int) -> orm.SeedResultModel:
    return orm.SeedResultModel(
        position=position,
        seed=seed.seed,
        best_step=seed.best_step,
        best_val_acc=seed.best_val_acc,
        test_acc=seed.test_acc,
        best_checkpoint=seed.best_checkpoint,
        metrics_path=seed.metrics_path,
        val_steps_json=json.dumps(seed.val_steps),
        val_history_json=json.dumps(seed.val_history),
    )


def run_result_to_model(
    result: RunResult,
    *,
    run_dir: Optional[str] = None,
    manifest: Optional[RunManifest] = None,
) -> orm.Run:
    """Build the ORM graph for a run; positions keep the (target, seed) order."""
    run = orm.Run(
        variant=result.variant.value,
        run_dir=run_dir,
        average=result.average,
        schema_version=result.schema_version,
        toolkit_version=manifest.toolkit_version if manifest else None,
        manifest_json=manifest.to_json(sort_keys=True) if manifest else None,
    )
    for t_index, target in enumerate(result.targets):
        target_model = orm.TargetResultModel(
            position=t_index,
            target_domain=target.target_domain,
            mean_test_acc=target.mean_test_acc,
            std_test_acc=target.std_test_acc,
        )
        target_model.seeds = [seed_to_model(s, i) for i, s in enumerate(target.seeds)]
        run.targets.append(target_model)
    return run


def model_to_run_result(run: orm.Run) -> RunResult:
    targets = []
    for target_model in run.targets:
        seeds = [
            SeedResult(
                seed=s.seed,
                target_domain=target_model.target_domain,
                best_step=s.best_step,
                best_val_acc=s.best_val_acc,
                test_acc=s.test_acc,
                best_checkpoint=s.best_checkpoint,
                val_steps=json.loads(s.val_steps_json),
                val_history=json.loads(s.val_history_json),
                metrics_path=s.metrics_path,
            )
            for s in target_model.seeds
        ]
        targets.append(
            TargetResult(
                target_domain=target_model.target_domain,
                seeds=seeds,
                mean_test_acc=target_model.mean_test_acc,
                std_test_acc=target_model.std_test_acc,
            )
        )
    return RunResult(
        variant=Variant.parse(run.variant),
        targets=targets,
        average=run.average,
        schema_version=run.schema_version,
    )
