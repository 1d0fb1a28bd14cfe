"""
One training step.

The sequence is fixed: augment x into x_a, draw the tap block, run the tapped
forward on x, take l_an from x_a with gradient recording disabled, assemble
L_ce + gamma * L_a + lambda * L_i, backpropagate and update. Variants switch
terms off (and skip the forwards they do not need) without changing the
order in which the random stream is consumed by the terms that remain.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional

import torch

from augment import AugmentPolicy, apply_batch, base_augment
from backbone import VisionTransformer, forward_final, forward_with_tap, sample_block_index
from data import Batch
from losses import LossBreakdown, agsd_loss, cross_entropy, ibsd_loss, softmax_temp, total_loss
from models import LossConfig, NumericError, TrainConfig, Variant

from .optimizer import grad_norm

logger = logging.getLogger(__name__)


class AugmentedPath(str, enum.Enum):
    """How l_an is produced. Only NO_GRAD is used in training."""

    NO_GRAD = "no_grad"
    DETACHED = "detached"
    # negative control for the stop-gradient check
    LIVE = "live"


@dataclass(slots=True)
class StepLogits:
    final: torch.Tensor
    tapped: Optional[torch.Tensor] = None
    augmented: Optional[torch.Tensor] = None


@dataclass(slots=True)
class StepResult:
    losses: LossBreakdown
    logits: StepLogits
    block_index: Optional[int]
    grad_norm: float


def augmented_logits(
    model: VisionTransformer,
    augmented: torch.Tensor,
    path: AugmentedPath = AugmentedPath.NO_GRAD,
) -> torch.Tensor:
    if path is AugmentedPath.NO_GRAD:
        with torch.no_grad():
            return forward_final(model, augmented)
    if path is AugmentedPath.DETACHED:
        return forward_final(model, augmented).detach()
    return forward_final(model, augmented)


def _zero(like: torch.Tensor) -> torch.Tensor:
    return torch.zeros((), dtype=like.dtype, device=like.device)


def compute_step_losses(
    model: VisionTransformer,
    images: torch.Tensor,
    onehot: torch.Tensor,
    augmented: Optional[torch.Tensor],
    block_index: Optional[int],
    variant: Variant,
    loss_config: LossConfig,
    *,
    path: AugmentedPath = AugmentedPath.NO_GRAD,
    check_contract: bool = False,
    precomputed_augmented_logits: Optional[torch.Tensor] = None,
) -> tuple[LossBreakdown, StepLogits]:
    """
    Forward passes and loss assembly for a single batch, without the update.

    precomputed_augmented_logits replaces the augmented forward; the gradient
    check uses it to hold l_an fixed while parameters are perturbed.
    """
    student_input = augmented if variant.trains_on_augmented else images
    if variant.uses_ibsd:
        tap = forward_with_tap(model, student_input, block_index)
        final, tapped = tap.final_logits, tap.tapped_logits
    else:
        final, tapped = forward_final(model, student_input), None

    ce = cross_entropy(onehot, softmax_temp(final, 1.0))
    ibsd = (
        ibsd_loss(final, tapped, loss_config.t1, detach_teacher=loss_config.detach_ibsd_teacher)
        if tapped is not None
        else _zero(ce)
    )

    l_an = None
    if variant.uses_agsd:
        if precomputed_augmented_logits is not None:
            l_an = precomputed_augmented_logits
        else:
            l_an = augmented_logits(model, augmented, path)
        agsd = agsd_loss(final, l_an, loss_config.t2, check_contract=check_contract)
    else:
        agsd = _zero(ce)

    breakdown = total_loss(ce, ibsd, agsd, loss_config)
    logits = StepLogits(
        final=final.detach(),
        tapped=None if tapped is None else tapped.detach(),
        augmented=None if l_an is None else l_an.detach(),
    )
    return breakdown, logits


def prepare_inputs(
    images: torch.Tensor,
    policy: AugmentPolicy,
    config: TrainConfig,
    rng: torch.Generator,
) -> tuple[torch.Tensor, Optional[torch.Tensor]]:
    """Optional base augmentation of x, then x_a from the policy when the variant uses it."""
    if config.base_augment:
        images = torch.stack([base_augment(image, rng) for image in images])
    augmented = apply_batch(policy, images, rng) if config.variant.uses_augmentation else None
    return images, augmented


def train_step(
    model: VisionTransformer,
    batch: Batch,
    policy: AugmentPolicy,
    config: TrainConfig,
    rng: torch.Generator,
    optimizer: torch.optim.Optimizer,
    *,
    step: int = 0,
    path: AugmentedPath = AugmentedPath.NO_GRAD,
) -> StepResult:
    variant = config.variant
    images, augmented = prepare_inputs(batch.images, policy, config, rng)
    block_index = None
    if variant.uses_ibsd:
        low, high = model.config.tap_range
        block_index = sample_block_index(rng, model.depth, low, high)

    model.train()
    try:
        losses, logits = compute_step_losses(
            model,
            images,
            batch.onehot,
            augmented,
            block_index,
            variant,
            config.loss,
            path=path,
            check_contract=config.debug_contracts,
        )
    except NumericError as exc:
        exc.step = step
        logger.error("step %d: non-finite %s", step, exc.component)
        raise

    optimizer.zero_grad(set_to_none=True)
    losses.total.backward()
    if config.grad_clip_norm is not None:
        norm = float(torch.nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip_norm))
    else:
        norm = grad_norm(model.parameters())
    if not torch.isfinite(torch.tensor(norm)):
        raise NumericError(
            f"step {step}: gradient norm is not finite",
            component="grad",
            step=step,
            grad_norm=norm,
        )
    optimizer.step()

    logger.debug("step %d block=%s %s grad_norm=%.4g", step, block_index, losses.as_floats(), norm)
    return StepResult(losses=losses, logits=logits, block_index=block_index, grad_norm=norm)
