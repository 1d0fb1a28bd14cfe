"""
Checkpoint files: config record plus named parameter arrays, optionally with
optimizer state. Loading is bit-exact.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import torch

from config import SCHEMA_VERSION
from models import BackboneConfig, CheckpointError

from .vit import VisionTransformer

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class Checkpoint:
    model: VisionTransformer
    step: int
    optimizer_state: Optional[dict[str, Any]]
    extra: dict[str, Any]


def save_checkpoint(
    path: Path,
    model: VisionTransformer,
    *,
    step: int = 0,
    optimizer_state: Optional[dict[str, Any]] = None,
    extra: Optional[dict[str, Any]] = None,
) -> Path:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": model.config.to_dict(),
        "dtype": str(model.cls_token.dtype).replace("torch.", ""),
        "step": step,
        "state_dict": {k: v.detach().clone() for k, v in model.state_dict().items()},
        "optimizer": optimizer_state,
        "extra": extra or {},
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save(payload, path)
    except OSError as exc:
        raise CheckpointError("failed to write checkpoint", path=str(path)) from exc
    logger.debug("saved checkpoint step=%d to %s", step, path)
    return path


def load_checkpoint(path: Path) -> Checkpoint:
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except (OSError, RuntimeError, EOFError) as exc:
        raise CheckpointError("failed to read checkpoint", path=str(path)) from exc

    if payload.get("schema_version") != SCHEMA_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint schema {payload.get('schema_version')!r}", path=str(path)
        )
    config = BackboneConfig.from_dict(payload["config"])
    model = VisionTransformer(config)
    if payload.get("dtype") == "float64":
        model = model.double()
    model.load_state_dict(payload["state_dict"])
    return Checkpoint(
        model=model,
        step=int(payload.get("step", 0)),
        optimizer_state=payload.get("optimizer"),
        extra=payload.get("extra", {}),
    )
