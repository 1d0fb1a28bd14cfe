"""
Checksums for parameters, tensors and files.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Iterable

import torch
from torch import nn


def tensor_checksum(tensors: Iterable[torch.Tensor]) -> str:
    digest = hashlib.sha256()
    for tensor in tensors:
        data = tensor.detach().cpu().contiguous()
        digest.update(str(data.dtype).encode("utf-8"))
        digest.update(str(tuple(data.shape)).encode("utf-8"))
        digest.update(data.numpy().tobytes())
    return digest.hexdigest()


def parameter_checksum(model: nn.Module) -> str:
    """SHA-256 over the named state dict in registration order."""
    digest = hashlib.sha256()
    for name, tensor in model.state_dict().items():
        digest.update(name.encode("utf-8"))
        digest.update(tensor_checksum([tensor]).encode("utf-8"))
    return digest.hexdigest()


def file_checksum(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()
