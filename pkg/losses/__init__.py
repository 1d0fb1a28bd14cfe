"""
Loss functions for classification and self-distillation.
"""

from .distillation import (
    LossBreakdown,
    agsd_loss,
    cross_entropy,
    ibsd_loss,
    kl_div,
    softmax_temp,
    total_loss,
)

__all__ = [
    "LossBreakdown",
    "agsd_loss",
    "cross_entropy",
    "ibsd_loss",
    "kl_div",
    "softmax_temp",
    "total_loss",
]
