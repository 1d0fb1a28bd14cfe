"""
Seed handling: every random stream in the toolkit is a torch.Generator
derived from an integer seed, never the global RNG.
"""

from __future__ import annotations

import hashlib

import torch

_SEED_MASK = (1 << 63) - 1


def derive_seed(*parts: object) -> int:
    """Split a seed into an independent stream id, e.g. derive_seed(seed, "epoch", 3)."""
    digest = hashlib.sha256("/".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") & _SEED_MASK


def make_generator(seed: int) -> torch.Generator:
    generator = torch.Generator(device="cpu")
    generator.manual_seed(int(seed))
    return generator


def enable_determinism(threads: int | None = 1) -> None:
    """Single-threaded, deterministic kernels for bit-reproducible runs."""
    torch.use_deterministic_algorithms(True)
    if threads is not None:
        torch.set_num_threads(threads)
