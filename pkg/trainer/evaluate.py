"""
Accuracy on clean images.
"""

from __future__ import annotations

from typing import Sequence

import torch

from backbone import VisionTransformer, forward_final
from config import EVAL_BATCH_SIZE
from data import Sample, sequential_batches
from models import DatasetError


@torch.no_grad()
def predict(model: VisionTransformer, images: torch.Tensor) -> torch.Tensor:
    return forward_final(model, images).argmax(dim=-1)


def evaluate(
    model: VisionTransformer,
    samples: Sequence[Sample],
    batch_size: int = EVAL_BATCH_SIZE,
) -> float:
    """Fraction of samples whose argmax(l_n) equals the label."""
    if len(samples) == 0:
        raise DatasetError("cannot evaluate on an empty sample set")
    was_training = model.training
    model.eval()
    correct = total = 0
    try:
        for batch in sequential_batches(samples, batch_size, model.config.num_classes):
            correct += int((predict(model, batch.images) == batch.labels).sum())
            total += len(batch)
    finally:
        model.train(was_training)
    return correct / total
