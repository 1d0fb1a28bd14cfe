"""
Classification and self-distillation losses.

The KL terms are implemented literally: KL(p(l_n/T) || p(l_other/T)) with no
T^2 rescaling, reduced by the batch mean. Gradients flow through both
arguments unless the caller detaches one of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from config import LOG_CLAMP_EPS
from models import (
    ContractViolation,
    DimensionError,
    LossConfig,
    NumericError,
    TemperatureError,
)


@dataclass(slots=True)
class LossBreakdown:
    """Scalar loss terms; total keeps its autograd graph for backward()."""

    ce: torch.Tensor
    ibsd: torch.Tensor
    agsd: torch.Tensor
    total: torch.Tensor

    def as_floats(self) -> dict[str, float]:
        return {
            "ce": float(self.ce.detach()),
            "ibsd": float(self.ibsd.detach()),
            "agsd": float(self.agsd.detach()),
            "total": float(self.total.detach()),
        }


def _check_same_shape(a: torch.Tensor, b: torch.Tensor, what: str) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{what}: shape mismatch {tuple(a.shape)} vs {tuple(b.shape)}")


def softmax_temp(logits: torch.Tensor, temperature: float) -> torch.Tensor:
    """sigma(logits / T) along the last axis (torch.softmax subtracts the max)."""
    if not temperature > 0:
        raise TemperatureError(f"temperature must be > 0, got {temperature}")
    if not torch.isfinite(logits).all():
        raise NumericError("logits contain non-finite values", component="logits")
    return torch.softmax(logits / temperature, dim=-1)


def kl_div(p: torch.Tensor, q: torch.Tensor, eps: float = LOG_CLAMP_EPS) -> torch.Tensor:
    """
    sum_j p_j log(p_j / q_j) over the last axis.

    Terms with p_j = 0 contribute 0; q is clamped below at eps inside the log.
    Returns a scalar for vectors and one value per row for batches.
    """
    _check_same_shape(p, q, "kl_div")
    return (torch.xlogy(p, p) - p * torch.log(q.clamp_min(eps))).sum(dim=-1)


def ibsd_loss(
    final_logits: torch.Tensor,
    tapped_logits: torch.Tensor,
    t1: float,
    *,
    detach_teacher: bool = False,
) -> torch.Tensor:
    """Intermediate-block self-distillation: mean KL(p(l_n/T1) || p(l_i/T1))."""
    _check_same_shape(final_logits, tapped_logits, "ibsd_loss")
    teacher = final_logits.detach() if detach_teacher else final_logits
    p = softmax_temp(teacher, t1)
    q = softmax_temp(tapped_logits, t1)
    return kl_div(p, q).mean()


def agsd_loss(
    final_logits: torch.Tensor,
    augmented_logits: torch.Tensor,
    t2: float,
    *,
    check_contract: bool = False,
) -> torch.Tensor:
    """
    Augmentation-guided self-distillation: mean KL(p(l_n/T2) || p(l_an/T2)).

    l_an must come from a gradient-free forward pass; with check_contract the
    function refuses an input that still records a graph.
    """
    _check_same_shape(final_logits, augmented_logits, "agsd_loss")
    if check_contract and augmented_logits.requires_grad:
        raise ContractViolation("augmented logits carry a live gradient path")
    p = softmax_temp(final_logits, t2)
    q = softmax_temp(augmented_logits, t2)
    return kl_div(p, q).mean()


def cross_entropy(
    y_onehot: torch.Tensor,
    y_hat: torch.Tensor,
    eps: float = LOG_CLAMP_EPS,
) -> torch.Tensor:
    """Mean over the batch of -log(y_hat[true class]), y_hat clamped below at eps."""
    _check_same_shape(y_onehot, y_hat, "cross_entropy")
    is_binary = ((y_onehot == 0) | (y_onehot == 1)).all()
    if not is_binary or not (y_onehot.sum(dim=-1) == 1).all():
        raise NumericError("labels are not one-hot", component="ce")
    y = y_onehot.to(y_hat.dtype)
    per_row = -(y * torch.log(y_hat.clamp_min(eps))).sum(dim=-1)
    return per_row.mean()


def total_loss(
    ce: torch.Tensor,
    ibsd: torch.Tensor,
    agsd: torch.Tensor,
    config: LossConfig,
) -> LossBreakdown:
    """L_total = L_ce + lambda * L_i + gamma * L_a."""
    for name, value in (("ce", ce), ("ibsd", ibsd), ("agsd", agsd)):
        if not torch.isfinite(torch.as_tensor(value)).all():
            raise NumericError(f"loss component {name} is not finite", component=name)
    total = ce + config.lam * ibsd + config.gamma * agsd
    return LossBreakdown(ce=ce, ibsd=ibsd, agsd=agsd, total=total)
