"""
AdamW: adaptive moments with decoupled weight decay.

optimizer_update is the pure form (returns new tensors); AdamW wraps the same
arithmetic as a torch optimizer so its state round-trips through
state_dict() into checkpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import torch

from config import ADAM_BETAS, ADAM_EPS, DEFAULT_LEARNING_RATE, DEFAULT_WEIGHT_DECAY
from models import ConfigurationError, DimensionError


@dataclass
class AdamState:
    step: int = 0
    exp_avg: list[torch.Tensor] = field(default_factory=list)
    exp_avg_sq: list[torch.Tensor] = field(default_factory=list)

    @classmethod
    def zeros_like(cls, params: Sequence[torch.Tensor]) -> "AdamState":
        return cls(
            step=0,
            exp_avg=[torch.zeros_like(p) for p in params],
            exp_avg_sq=[torch.zeros_like(p) for p in params],
        )


def _adamw_tensor(
    param: torch.Tensor,
    grad: torch.Tensor,
    exp_avg: torch.Tensor,
    exp_avg_sq: torch.Tensor,
    step: int,
    learning_rate: float,
    weight_decay: float,
    betas: tuple[float, float],
    eps: float,
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    beta1, beta2 = betas
    param = param * (1.0 - learning_rate * weight_decay)
    exp_avg = beta1 * exp_avg + (1.0 - beta1) * grad
    exp_avg_sq = beta2 * exp_avg_sq + (1.0 - beta2) * grad * grad
    m_hat = exp_avg / (1.0 - beta1 ** step)
    v_hat = exp_avg_sq / (1.0 - beta2 ** step)
    param = param - learning_rate * m_hat / (v_hat.sqrt() + eps)
    return param, exp_avg, exp_avg_sq


def optimizer_update(
    params: Sequence[torch.Tensor],
    grads: Sequence[torch.Tensor],
    state: AdamState,
    learning_rate: float,
    weight_decay: float,
    *,
    betas: tuple[float, float] = ADAM_BETAS,
    eps: float = ADAM_EPS,
) -> tuple[list[torch.Tensor], AdamState]:
    """One AdamW step; inputs are left untouched."""
    if not (len(params) == len(grads) == len(state.exp_avg) == len(state.exp_avg_sq)):
        raise DimensionError("params, grads and optimizer state differ in length")
    for index, (p, g, m, v) in enumerate(zip(params, grads, state.exp_avg, state.exp_avg_sq)):
        if not p.shape == g.shape == m.shape == v.shape:
            raise DimensionError(
                f"tensor {index}: param {tuple(p.shape)}, grad {tuple(g.shape)}, "
                f"state {tuple(m.shape)}/{tuple(v.shape)}"
            )

    step = state.step + 1
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.exp_avg, state.exp_avg_sq):
        p2, m2, v2 = _adamw_tensor(p, g, m, v, step, learning_rate, weight_decay, betas, eps)
        new_params.append(p2)
        new_m.append(m2)
        new_v.append(v2)
    return new_params, AdamState(step=step, exp_avg=new_m, exp_avg_sq=new_v)


class AdamW(torch.optim.Optimizer):
    """
    AdamW over torch parameters, sharing its arithmetic with optimizer_update.

    Parameters without a gradient are skipped and keep their state.
    """

    def __init__(
        self,
        params: Iterable[torch.nn.Parameter],
        lr: float = DEFAULT_LEARNING_RATE,
        betas: tuple[float, float] = ADAM_BETAS,
        eps: float = ADAM_EPS,
        weight_decay: float = DEFAULT_WEIGHT_DECAY,
    ) -> None:
        if not lr > 0:
            raise ConfigurationError(f"learning rate must be > 0, got {lr}")
        if weight_decay < 0:
            raise ConfigurationError(f"weight decay must be >= 0, got {weight_decay}")
        if not all(0.0 <= b < 1.0 for b in betas):
            raise ConfigurationError(f"betas must lie in [0, 1), got {betas}")
        defaults = dict(lr=lr, betas=tuple(betas), eps=eps, weight_decay=weight_decay)
        super().__init__(params, defaults)

    @torch.no_grad()
    def step(self, closure=None):
        loss = None
        if closure is not None:
            with torch.enable_grad():
                loss = closure()

        for group in self.param_groups:
            for p in group["params"]:
                if p.grad is None:
                    continue
                state = self.state[p]
                if not state:
                    state["step"] = 0
                    state["exp_avg"] = torch.zeros_like(p)
                    state["exp_avg_sq"] = torch.zeros_like(p)
                state["step"] += 1
                new_p, exp_avg, exp_avg_sq = _adamw_tensor(
                    p,
                    p.grad,
                    state["exp_avg"],
                    state["exp_avg_sq"],
                    state["step"],
                    group["lr"],
                    group["weight_decay"],
                    group["betas"],
                    group["eps"],
                )
                p.copy_(new_p)
                state["exp_avg"] = exp_avg
                state["exp_avg_sq"] = exp_avg_sq
        return loss


def grad_norm(parameters: Iterable[torch.nn.Parameter]) -> float:
    """Global L2 norm of the current gradients (nan/inf propagate)."""
    norms = [p.grad.detach().norm(2) for p in parameters if p.grad is not None]
    if not norms:
        return 0.0
    return math.sqrt(float(sum(float(n) ** 2 for n in norms)))
