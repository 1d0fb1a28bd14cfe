"""
Data models for the RRLD toolkit

Every record round-trips through JSON via dataclasses-json; configs validate
themselves and raise ConfigurationError naming the violated constraint.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from dataclasses_json import dataclass_json

from config import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_DEPTH,
    DEFAULT_EMBED_DIM,
    DEFAULT_GAMMA,
    DEFAULT_HEADS,
    DEFAULT_IMAGE_SIZE,
    DEFAULT_IN_CHANNELS,
    DEFAULT_LAMBDA,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_STEPS,
    DEFAULT_MLP_RATIO,
    DEFAULT_NOISE_PARAMS,
    DEFAULT_PATCH_SIZE,
    DEFAULT_SEEDS,
    DEFAULT_T1,
    DEFAULT_T2,
    DEFAULT_WEIGHT_DECAY,
    NOISE_KINDS,
    SCHEMA_VERSION,
)

from .errors import ConfigurationError


class Variant(str, enum.Enum):
    """Training variants: the full method and its ablations."""

    ERM = "ERM"
    ERM_AA = "ERM_AA"
    IBSD_ONLY = "IBSD_only"
    AGSD_ONLY = "AGSD_only"
    IBSD_AA = "IBSD_AA"
    RRLD = "RRLD"

    @classmethod
    def parse(cls, value: str) -> "Variant":
        for variant in cls:
            if variant.value.lower() == value.strip().lower():
                return variant
        names = ", ".join(v.value for v in cls)
        raise ConfigurationError(f"unknown variant {value!r}; expected one of: {names}")

    @property
    def uses_augmentation(self) -> bool:
        return self in (Variant.ERM_AA, Variant.IBSD_AA, Variant.AGSD_ONLY, Variant.RRLD)

    @property
    def uses_ibsd(self) -> bool:
        return self in (Variant.IBSD_ONLY, Variant.IBSD_AA, Variant.RRLD)

    @property
    def uses_agsd(self) -> bool:
        return self in (Variant.AGSD_ONLY, Variant.RRLD)

    @property
    def trains_on_augmented(self) -> bool:
        """True when L_ce (and L_i) are computed on x_a instead of x."""
        return self in (Variant.ERM_AA, Variant.IBSD_AA)


@dataclass_json
@dataclass
class BackboneConfig:
    image_size: int = DEFAULT_IMAGE_SIZE
    in_channels: int = DEFAULT_IN_CHANNELS
    patch_size: int = DEFAULT_PATCH_SIZE
    embed_dim: int = DEFAULT_EMBED_DIM
    depth: int = DEFAULT_DEPTH
    heads: int = DEFAULT_HEADS
    mlp_ratio: float = DEFAULT_MLP_RATIO
    num_classes: int = 4
    seed: int = 0
    # Eligible tap blocks are [tap_min_block, tap_max_block]; None means depth - 1.
    tap_min_block: int = 1
    tap_max_block: Optional[int] = None

    def validate(self) -> "BackboneConfig":
        if self.image_size <= 0 or self.patch_size <= 0:
            raise ConfigurationError("image_size and patch_size must be positive")
        if self.image_size % self.patch_size != 0:
            raise ConfigurationError(
                f"image_size ({self.image_size}) must be divisible by patch_size ({self.patch_size})"
            )
        if self.heads <= 0 or self.embed_dim % self.heads != 0:
            raise ConfigurationError(
                f"embed_dim ({self.embed_dim}) must be divisible by heads ({self.heads})"
            )
        if self.depth < 2:
            raise ConfigurationError(f"depth must be >= 2, got {self.depth}")
        if self.num_classes < 2:
            raise ConfigurationError(f"num_classes must be >= 2, got {self.num_classes}")
        if self.in_channels not in (1, 3):
            raise ConfigurationError(f"in_channels must be 1 or 3, got {self.in_channels}")
        if self.mlp_ratio <= 0:
            raise ConfigurationError("mlp_ratio must be positive")
        low, high = self.tap_range
        if not 1 <= low <= high <= self.depth - 1:
            raise ConfigurationError(
                f"tap block range [{low}, {high}] must lie within [1, {self.depth - 1}]"
            )
        return self

    @property
    def num_patches(self) -> int:
        return (self.image_size // self.patch_size) ** 2

    @property
    def token_count(self) -> int:
        return self.num_patches + 1

    @property
    def tap_range(self) -> Tuple[int, int]:
        high = self.depth - 1 if self.tap_max_block is None else self.tap_max_block
        return self.tap_min_block, high


@dataclass_json
@dataclass
class LossConfig:
    t1: float = DEFAULT_T1
    t2: float = DEFAULT_T2
    lam: float = DEFAULT_LAMBDA
    gamma: float = DEFAULT_GAMMA
    detach_ibsd_teacher: bool = False

    def validate(self) -> "LossConfig":
        if not self.t1 > 0:
            raise ConfigurationError(f"T1 must be > 0, got {self.t1}")
        if not self.t2 > 0:
            raise ConfigurationError(f"T2 must be > 0, got {self.t2}")
        if self.lam < 0:
            raise ConfigurationError(f"lambda must be >= 0, got {self.lam}")
        if self.gamma < 0:
            raise ConfigurationError(f"gamma must be >= 0, got {self.gamma}")
        return self


@dataclass_json
@dataclass
class TrainConfig:
    loss: LossConfig = field(default_factory=LossConfig)
    learning_rate: float = DEFAULT_LEARNING_RATE
    batch_size: int = DEFAULT_BATCH_SIZE
    weight_decay: float = DEFAULT_WEIGHT_DECAY
    max_steps: int = DEFAULT_MAX_STEPS
    # None: once per epoch-equivalent of the training pool
    eval_every: Optional[int] = None
    seeds: List[int] = field(default_factory=lambda: list(DEFAULT_SEEDS))
    variant: Variant = Variant.RRLD
    grad_clip_norm: Optional[float] = None
    base_augment: bool = False
    float64: bool = False
    debug_contracts: bool = False
    save_checkpoints: bool = True

    def validate(self) -> "TrainConfig":
        self.loss.validate()
        if not self.learning_rate > 0:
            raise ConfigurationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.weight_decay < 0:
            raise ConfigurationError("weight_decay must be >= 0")
        if self.max_steps < 0:
            raise ConfigurationError("max_steps must be >= 0")
        if self.eval_every is not None and self.eval_every < 1:
            raise ConfigurationError("eval_every must be >= 1")
        if not self.seeds:
            raise ConfigurationError("seeds must be nonempty")
        if self.grad_clip_norm is not None and not self.grad_clip_norm > 0:
            raise ConfigurationError("grad_clip_norm must be > 0 when set")
        return self


@dataclass_json
@dataclass
class NoiseSpec:
    kind: str
    # gaussian/speckle: sigma; impulse: flip probability; shot: photon-count scale
    param: Optional[float] = None
    seed: int = 0

    def validate(self) -> "NoiseSpec":
        if self.kind not in NOISE_KINDS:
            raise ConfigurationError(
                f"unknown noise kind {self.kind!r}; expected one of: {', '.join(NOISE_KINDS)}"
            )
        value = self.resolved_param
        if not math.isfinite(value) or value < 0:
            raise ConfigurationError(f"{self.kind} parameter must be finite and >= 0")
        if self.kind == "shot" and value == 0:
            raise ConfigurationError("shot noise scale must be > 0")
        if self.kind == "impulse" and value > 1:
            raise ConfigurationError("impulse probability must be <= 1")
        return self

    @property
    def resolved_param(self) -> float:
        if self.param is None:
            return float(DEFAULT_NOISE_PARAMS[self.kind])
        return float(self.param)


@dataclass_json
@dataclass
class MetricsRecord:
    step: int
    kind: str = "step"  # "step", "eval" or "test"
    ce: Optional[float] = None
    ibsd: Optional[float] = None
    agsd: Optional[float] = None
    total: Optional[float] = None
    block_index: Optional[int] = None
    val_acc: Optional[float] = None
    test_acc: Optional[float] = None
    schema_version: str = SCHEMA_VERSION


def mean_and_std(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and sample standard deviation; exactly (v, 0.0) when every value is v."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot aggregate an empty sequence")
    if arr.size == 1 or np.all(arr == arr[0]):
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1))


@dataclass_json
@dataclass
class SeedResult:
    seed: int
    target_domain: str
    best_step: int
    best_val_acc: float
    test_acc: float
    best_checkpoint: Optional[str] = None
    val_steps: List[int] = field(default_factory=list)
    val_history: List[float] = field(default_factory=list)
    metrics_path: Optional[str] = None


@dataclass_json
@dataclass
class TargetResult:
    target_domain: str
    seeds: List[SeedResult] = field(default_factory=list)
    mean_test_acc: float = 0.0
    std_test_acc: float = 0.0

    @classmethod
    def from_seeds(cls, target_domain: str, seeds: List[SeedResult]) -> "TargetResult":
        mean, std = mean_and_std([s.test_acc for s in seeds])
        return cls(target_domain=target_domain, seeds=seeds, mean_test_acc=mean, std_test_acc=std)


@dataclass_json
@dataclass
class RunResult:
    variant: Variant
    targets: List[TargetResult] = field(default_factory=list)
    average: float = 0.0
    schema_version: str = SCHEMA_VERSION

    @classmethod
    def from_targets(cls, variant: Variant, targets: List[TargetResult]) -> "RunResult":
        average = float(np.mean([t.mean_test_acc for t in targets])) if targets else 0.0
        return cls(variant=variant, targets=targets, average=average)

    @property
    def domains(self) -> List[str]:
        return [t.target_domain for t in self.targets]


@dataclass_json
@dataclass
class RunManifest:
    variant: Variant
    backbone: BackboneConfig
    train: TrainConfig
    data_dir: str
    output_dir: str
    seeds: List[int] = field(default_factory=list)
    policy_name: str = "imagenet"
    policy_text: str = ""
    noise_specs: List[NoiseSpec] = field(default_factory=list)
    dataset_fingerprint: str = ""
    toolkit_version: str = ""
    created_at: str = ""
    workers: int = 1
    # empty: every domain is a target
    targets: List[str] = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION
