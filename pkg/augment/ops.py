"""
AutoAugment image operations on float C x H x W tensors in [0, 1].

Magnitude levels 0-9 map linearly onto each op's physical range. Signed ops
(geometric ones and the enhance family) get a random sign per application.

| op           | level 0 -> level 9            | signed |
|--------------|-------------------------------|--------|
| shear_x/y    | 0 -> 0.3 (shear factor)       | yes    |
| translate_x/y| 0 -> 150/331 of the image side| yes    |
| rotate       | 0 -> 30 degrees               | yes    |
| color        | factor 1 +/- (0 -> 0.9)       | yes    |
| contrast     | factor 1 +/- (0 -> 0.9)       | yes    |
| sharpness    | factor 1 +/- (0 -> 0.9)       | yes    |
| brightness   | factor 1 +/- (0 -> 0.9)       | yes    |
| posterize    | 8 -> 4 bits kept              | no     |
| solarize     | threshold 1.0 -> 0.0          | no     |
| autocontrast, equalize, invert | no magnitude| no     |

On single-channel images color is the identity; every other op applies
as-is (equalize and posterize work on the 8-bit quantized channel).
"""

from __future__ import annotations

import math
from typing import Callable

import torch
import torchvision.transforms.functional as TF
from torchvision.transforms import InterpolationMode

from config import AUGMENT_FILL, BASE_AUGMENT_PADDING, MAGNITUDE_LEVELS

OP_NAMES = (
    "shear_x",
    "shear_y",
    "translate_x",
    "translate_y",
    "rotate",
    "color",
    "posterize",
    "solarize",
    "contrast",
    "sharpness",
    "brightness",
    "autocontrast",
    "equalize",
    "invert",
)

SIGNED_OPS = frozenset(
    {"shear_x", "shear_y", "translate_x", "translate_y", "rotate", "color", "contrast", "sharpness", "brightness"}
)

_MAX_TRANSLATE_FRACTION = 150.0 / 331.0
_TOP_LEVEL = MAGNITUDE_LEVELS - 1


def magnitude_value(name: str, level: int, image_size: int) -> float:
    """Physical magnitude for a level, before any random sign."""
    frac = level / _TOP_LEVEL
    if name in ("shear_x", "shear_y"):
        return 0.3 * frac
    if name in ("translate_x", "translate_y"):
        return _MAX_TRANSLATE_FRACTION * image_size * frac
    if name == "rotate":
        return 30.0 * frac
    if name in ("color", "contrast", "sharpness", "brightness"):
        return 0.9 * frac
    if name == "posterize":
        return float(8 - int(round(level / (_TOP_LEVEL / 4))))
    if name == "solarize":
        return 1.0 - frac
    return 0.0


def _fill(image: torch.Tensor) -> list[float]:
    return [AUGMENT_FILL] * image.shape[0]


def _to_uint8(image: torch.Tensor) -> torch.Tensor:
    return (image * 255.0).round().clamp(0, 255).to(torch.uint8)


def _from_uint8(image: torch.Tensor, dtype: torch.dtype) -> torch.Tensor:
    return image.to(dtype) / 255.0


def _shear(image: torch.Tensor, value: float, axis: str) -> torch.Tensor:
    degrees = math.degrees(math.atan(value))
    shear = [degrees, 0.0] if axis == "x" else [0.0, degrees]
    return TF.affine(
        image,
        angle=0.0,
        translate=[0, 0],
        scale=1.0,
        shear=shear,
        interpolation=InterpolationMode.NEAREST,
        fill=_fill(image),
        center=[0, 0],
    )


def _translate(image: torch.Tensor, value: float, axis: str) -> torch.Tensor:
    offset = int(round(value))
    translate = [offset, 0] if axis == "x" else [0, offset]
    return TF.affine(
        image,
        angle=0.0,
        translate=translate,
        scale=1.0,
        shear=[0.0, 0.0],
        interpolation=InterpolationMode.NEAREST,
        fill=_fill(image),
    )


def _color(image: torch.Tensor, value: float) -> torch.Tensor:
    if image.shape[0] == 1:
        return image
    return TF.adjust_saturation(image, 1.0 + value)


def _posterize(image: torch.Tensor, value: float) -> torch.Tensor:
    return _from_uint8(TF.posterize(_to_uint8(image), int(value)), image.dtype)


def _equalize(image: torch.Tensor, _: float) -> torch.Tensor:
    return _from_uint8(TF.equalize(_to_uint8(image)), image.dtype)


_OPS: dict[str, Callable[[torch.Tensor, float], torch.Tensor]] = {
    "shear_x": lambda img, v: _shear(img, v, "x"),
    "shear_y": lambda img, v: _shear(img, v, "y"),
    "translate_x": lambda img, v: _translate(img, v, "x"),
    "translate_y": lambda img, v: _translate(img, v, "y"),
    "rotate": lambda img, v: TF.rotate(
        img, v, interpolation=InterpolationMode.NEAREST, fill=_fill(img)
    ),
    "color": _color,
    "posterize": _posterize,
    "solarize": lambda img, v: TF.solarize(img, v),
    "contrast": lambda img, v: TF.adjust_contrast(img, 1.0 + v),
    "sharpness": lambda img, v: TF.adjust_sharpness(img, 1.0 + v),
    "brightness": lambda img, v: TF.adjust_brightness(img, 1.0 + v),
    "autocontrast": lambda img, _: TF.autocontrast(img),
    "equalize": _equalize,
    "invert": lambda img, _: TF.invert(img),
}


def apply_op(image: torch.Tensor, name: str, level: int, negate: bool = False) -> torch.Tensor:
    """Apply one op at a magnitude level; output is clamped to [0, 1]."""
    value = magnitude_value(name, level, image.shape[-1])
    if negate and name in SIGNED_OPS:
        value = -value
    return _OPS[name](image, value).clamp(0.0, 1.0)


def base_augment(image: torch.Tensor, rng: torch.Generator) -> torch.Tensor:
    """Random horizontal flip plus a random crop from a reflect-padded image."""
    if torch.rand(1, generator=rng).item() < 0.5:
        image = TF.hflip(image)
    pad = BASE_AUGMENT_PADDING
    padded = torch.nn.functional.pad(image.unsqueeze(0), (pad, pad, pad, pad), mode="reflect").squeeze(0)
    top, left = (int(v) for v in torch.randint(0, 2 * pad + 1, (2,), generator=rng))
    return TF.crop(padded, top, left, image.shape[-2], image.shape[-1])
