"""
Augmentation policies: the AutoAugment ImageNet policy, the policy file
codec, and seeded application to images.

Policy file schema (one sub-policy per line, blank lines and `#` comments
ignored)::

    <op> <probability> <level> | <op> <probability> <level>

Ops without a magnitude still carry a level (conventionally 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import torch

from models import ConfigurationError, NumericError, PolicyParseError

from .ops import OP_NAMES, apply_op

POLICY_FILE = Path(__file__).resolve().parent / "imagenet.policy"

# (op, probability, level) pairs of the 25 ImageNet sub-policies.
IMAGENET_SUB_POLICIES = (
    (("posterize", 0.4, 8), ("rotate", 0.6, 9)),
    (("solarize", 0.6, 5), ("autocontrast", 0.6, 0)),
    (("equalize", 0.8, 0), ("equalize", 0.6, 0)),
    (("posterize", 0.6, 7), ("posterize", 0.6, 6)),
    (("equalize", 0.4, 0), ("solarize", 0.2, 4)),
    (("equalize", 0.4, 0), ("rotate", 0.8, 8)),
    (("solarize", 0.6, 3), ("equalize", 0.6, 0)),
    (("posterize", 0.8, 5), ("equalize", 1.0, 0)),
    (("rotate", 0.2, 3), ("solarize", 0.6, 8)),
    (("equalize", 0.6, 0), ("posterize", 0.4, 6)),
    (("rotate", 0.8, 8), ("color", 0.4, 0)),
    (("rotate", 0.4, 9), ("equalize", 0.6, 0)),
    (("equalize", 0.0, 0), ("equalize", 0.8, 0)),
    (("invert", 0.6, 0), ("equalize", 1.0, 0)),
    (("color", 0.6, 4), ("contrast", 1.0, 8)),
    (("rotate", 0.8, 8), ("color", 1.0, 2)),
    (("color", 0.8, 8), ("solarize", 0.8, 7)),
    (("sharpness", 0.4, 7), ("invert", 0.6, 0)),
    (("shear_x", 0.6, 5), ("equalize", 1.0, 0)),
    (("color", 0.4, 0), ("equalize", 0.6, 0)),
    (("equalize", 0.4, 0), ("solarize", 0.2, 4)),
    (("solarize", 0.6, 5), ("autocontrast", 0.6, 0)),
    (("invert", 0.6, 0), ("equalize", 1.0, 0)),
    (("color", 0.6, 4), ("contrast", 1.0, 8)),
    (("equalize", 0.8, 0), ("equalize", 0.6, 0)),
)


@dataclass(frozen=True)
class AugmentOp:
    name: str
    probability: float
    magnitude: int

    def __post_init__(self) -> None:
        if self.name not in OP_NAMES:
            raise ConfigurationError(f"unsupported augmentation op {self.name!r}")
        if not 0.0 <= self.probability <= 1.0:
            raise ConfigurationError(f"probability must be in [0, 1], got {self.probability}")
        if not 0 <= self.magnitude <= 9:
            raise ConfigurationError(f"magnitude level must be in 0..9, got {self.magnitude}")


@dataclass(frozen=True)
class AugmentPolicy:
    sub_policies: tuple[tuple[AugmentOp, AugmentOp], ...]
    name: str = "custom"

    def __post_init__(self) -> None:
        if not self.sub_policies:
            raise ConfigurationError("a policy needs at least one sub-policy")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AugmentPolicy):
            return NotImplemented
        return self.sub_policies == other.sub_policies

    def __hash__(self) -> int:
        return hash(self.sub_policies)

    def __len__(self) -> int:
        return len(self.sub_policies)


def default_policy() -> AugmentPolicy:
    """The AutoAugment ImageNet policy."""
    return AugmentPolicy(
        sub_policies=tuple(
            (AugmentOp(*first), AugmentOp(*second)) for first, second in IMAGENET_SUB_POLICIES
        ),
        name="imagenet",
    )


def zero_policy(policy: AugmentPolicy) -> AugmentPolicy:
    """Same sub-policies with every probability set to 0."""
    return AugmentPolicy(
        sub_policies=tuple(
            tuple(AugmentOp(op.name, 0.0, op.magnitude) for op in pair) for pair in policy.sub_policies
        ),
        name=f"{policy.name}-zero",
    )


def _parse_op(chunk: str, line_no: int) -> AugmentOp:
    fields = chunk.split()
    if len(fields) != 3:
        raise PolicyParseError(
            f"expected '<op> <probability> <level>', got {chunk.strip()!r}", line=line_no
        )
    name, prob_text, level_text = fields
    if name not in OP_NAMES:
        raise PolicyParseError(f"unsupported op {name!r}", line=line_no)
    try:
        probability = float(prob_text)
    except ValueError as exc:
        raise PolicyParseError(f"bad probability {prob_text!r}", line=line_no) from exc
    try:
        level = int(level_text)
    except ValueError as exc:
        raise PolicyParseError(f"bad magnitude {level_text!r}", line=line_no) from exc
    try:
        return AugmentOp(name, probability, level)
    except ConfigurationError as exc:
        raise PolicyParseError(str(exc), line=line_no) from exc


def parse_policy(text: str, name: str = "custom") -> AugmentPolicy:
    sub_policies = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        chunks = line.split("|")
        if len(chunks) != 2:
            raise PolicyParseError("a sub-policy needs exactly two ops separated by '|'", line=line_no)
        sub_policies.append(tuple(_parse_op(chunk, line_no) for chunk in chunks))
    if not sub_policies:
        raise PolicyParseError("policy has no sub-policies")
    return AugmentPolicy(sub_policies=tuple(sub_policies), name=name)


def serialize_policy(policy: AugmentPolicy) -> str:
    lines = [f"# {policy.name}: <op> <probability> <level> | <op> <probability> <level>"]
    for first, second in policy.sub_policies:
        lines.append(
            f"{first.name} {first.probability:g} {first.magnitude} | "
            f"{second.name} {second.probability:g} {second.magnitude}"
        )
    return "\n".join(lines) + "\n"


def load_policy(path: Path | None = None) -> AugmentPolicy:
    """Read a policy file; without a path the bundled ImageNet policy file is used."""
    path = POLICY_FILE if path is None else Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PolicyParseError(f"cannot read policy file {path}") from exc
    return parse_policy(text, name=path.stem)


def apply(policy: AugmentPolicy, image: torch.Tensor, rng: torch.Generator) -> torch.Tensor:
    """
    Pick one sub-policy uniformly, then fire each of its two ops with its own
    probability. Deterministic given the generator state.
    """
    if image.numel() and (image.min() < 0 or image.max() > 1):
        raise NumericError("pixel values must lie in [0, 1]", component="augment")
    index = int(torch.randint(len(policy.sub_policies), (1,), generator=rng).item())
    out = image
    for op in policy.sub_policies[index]:
        fire = torch.rand(1, generator=rng).item() < op.probability
        negate = torch.rand(1, generator=rng).item() < 0.5
        if fire:
            out = apply_op(out, op.name, op.magnitude, negate=negate)
    return out


def apply_batch(policy: AugmentPolicy, images: torch.Tensor, rng: torch.Generator) -> torch.Tensor:
    return torch.stack([apply(policy, image, rng) for image in images])
