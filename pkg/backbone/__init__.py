"""
Backbone package: tiny ViT with intermediate-block taps.
"""

from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .vit import (
    TapOutput,
    VisionTransformer,
    forward_final,
    forward_with_tap,
    init_model,
    sample_block_index,
)

__all__ = [
    "Checkpoint",
    "load_checkpoint",
    "save_checkpoint",
    "TapOutput",
    "VisionTransformer",
    "forward_final",
    "forward_with_tap",
    "init_model",
    "sample_block_index",
]
