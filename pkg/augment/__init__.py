"""
Seeded AutoAugment-style augmentation.
"""

from .ops import OP_NAMES, SIGNED_OPS, apply_op, base_augment, magnitude_value
from .policy import (
    POLICY_FILE,
    AugmentOp,
    AugmentPolicy,
    apply,
    apply_batch,
    default_policy,
    load_policy,
    parse_policy,
    serialize_policy,
    zero_policy,
)

__all__ = [
    "OP_NAMES",
    "SIGNED_OPS",
    "apply_op",
    "base_augment",
    "magnitude_value",
    "POLICY_FILE",
    "AugmentOp",
    "AugmentPolicy",
    "apply",
    "apply_batch",
    "default_policy",
    "load_policy",
    "parse_policy",
    "serialize_policy",
    "zero_policy",
]
