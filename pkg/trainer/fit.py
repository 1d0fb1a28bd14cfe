"""
Training for one (target domain, seed) pair with unified-validation model
selection and a single final read of the target domain.
"""

from __future__ import annotations

import copy
import logging
import math
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from augment import AugmentPolicy, default_policy
from backbone import VisionTransformer, init_model, load_checkpoint, save_checkpoint
from data import ProtocolSplit, batches
from models import BackboneConfig, MetricsRecord, SeedResult, TrainConfig
from utils import derive_seed, make_generator

from .evaluate import evaluate
from .metrics import MetricsWriter
from .optimizer import AdamW
from .run_dir import RunDirectory
from .step import AugmentedPath, train_step

logger = logging.getLogger(__name__)

FINAL_EVALUATION = "final_evaluation"


def select_best(history: Sequence[float]) -> int:
    """Index of the highest accuracy; ties go to the earliest entry."""
    if not history:
        raise ValueError("validation history is empty")
    best = 0
    for index, value in enumerate(history):
        if value > history[best]:
            best = index
    return best


def resolve_eval_every(config: TrainConfig, train_size: int) -> int:
    if config.eval_every is not None:
        return config.eval_every
    return max(1, math.ceil(train_size / config.batch_size))


def build_model(backbone: BackboneConfig, num_classes: int, seed: int, float64: bool = False) -> VisionTransformer:
    config = replace(backbone, num_classes=num_classes, seed=derive_seed(backbone.seed, seed, "init"))
    model = init_model(config)
    return model.double() if float64 else model


def fit(
    split: ProtocolSplit,
    backbone: BackboneConfig,
    config: TrainConfig,
    seed: int,
    *,
    policy: Optional[AugmentPolicy] = None,
    run_dir: Optional[RunDirectory] = None,
    path: AugmentedPath = AugmentedPath.NO_GRAD,
) -> SeedResult:
    config.validate()
    policy = policy or default_policy()
    target = split.target_domain
    model = build_model(backbone, split.num_classes, seed, config.float64)
    optimizer = AdamW(
        model.parameters(),
        lr=config.learning_rate,
        weight_decay=config.weight_decay,
    )
    rng = make_generator(derive_seed(seed, target, "train"))
    eval_every = resolve_eval_every(config, len(split.train))

    metrics_path = run_dir.metrics_path(target, seed) if run_dir else None
    val_steps: list[int] = []
    val_history: list[float] = []
    best_state = copy.deepcopy(model.state_dict())
    best_checkpoint: Optional[Path] = None

    def validate(step: int, writer: MetricsWriter) -> None:
        nonlocal best_state, best_checkpoint
        acc = evaluate(model, split.unified_val)
        improved = not val_history or acc > max(val_history)
        val_steps.append(step)
        val_history.append(acc)
        writer.write(MetricsRecord(step=step, kind="eval", val_acc=acc))
        if improved:
            best_state = copy.deepcopy(model.state_dict())
            if run_dir is not None and config.save_checkpoints:
                # only the current best stays on disk
                ckpt = run_dir.checkpoint_path(target, seed, step)
                save_checkpoint(ckpt, model, step=step, optimizer_state=optimizer.state_dict())
                if best_checkpoint is not None:
                    best_checkpoint.unlink(missing_ok=True)
                best_checkpoint = ckpt
        logger.info("[%s seed %d] step %d val_acc=%.4f best=%.4f", target, seed, step, acc, max(val_history))

    with MetricsWriter(metrics_path) as writer:
        validate(0, writer)
        step = 0
        epoch = 0
        while step < config.max_steps:
            epoch_seed = derive_seed(seed, target, "epoch", epoch)
            for batch in batches(split.train, config.batch_size, epoch_seed, split.num_classes):
                step += 1
                result = train_step(model, batch, policy, config, rng, optimizer, step=step, path=path)
                values = result.losses.as_floats()
                writer.write(
                    MetricsRecord(
                        step=step,
                        kind="step",
                        ce=values["ce"],
                        ibsd=values["ibsd"],
                        agsd=values["agsd"],
                        total=values["total"],
                        block_index=result.block_index,
                    )
                )
                if step % eval_every == 0 or step == config.max_steps:
                    validate(step, writer)
                if step >= config.max_steps:
                    break
            epoch += 1

        best_index = select_best(val_history)
        best_step = val_steps[best_index]
        if best_checkpoint is not None:
            model = load_checkpoint(best_checkpoint).model
        else:
            model.load_state_dict(best_state)

        with split.test.reading(FINAL_EVALUATION):
            test_acc = evaluate(model, split.test)
        writer.write(MetricsRecord(step=best_step, kind="test", test_acc=test_acc))

    logger.info(
        "[%s seed %d] best step %d val_acc=%.4f test_acc=%.4f",
        target,
        seed,
        best_step,
        val_history[best_index],
        test_acc,
    )
    return SeedResult(
        seed=seed,
        target_domain=target,
        best_step=best_step,
        best_val_acc=val_history[best_index],
        test_acc=test_acc,
        best_checkpoint=str(best_checkpoint) if best_checkpoint else None,
        val_steps=val_steps,
        val_history=val_history,
        metrics_path=str(metrics_path) if metrics_path else None,
    )

