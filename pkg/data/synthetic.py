"""
Synthetic multi-domain image generator.

The class is the glyph that is drawn; the domain is the rendering style
(palette, background texture, stroke thickness, outline vs filled). The
label function is shared across domains while the pixel statistics shift.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import torch
from dataclasses_json import dataclass_json

from config import SYNTH_MIN_PER_DOMAIN
from models import ConfigurationError
from utils import derive_seed, make_generator

from .datasets import MultiDomainDataset, Sample

logger = logging.getLogger(__name__)

BASE_GLYPHS = ("ring", "square", "triangle", "cross", "hbars", "vbars", "diamond", "saltire")
# a base glyph plus a dot just outside one corner
CORNERS = {"nw": (-1, -1), "ne": (-1, 1), "sw": (1, -1), "se": (1, 1)}
GLYPHS = BASE_GLYPHS + tuple(f"{g}_{c}" for c in CORNERS for g in BASE_GLYPHS)
TEXTURES = ("flat", "stripes", "checker", "noise")


@dataclass_json
@dataclass
class SyntheticConfig:
    num_classes: int = 4
    num_domains: int = 3
    per_domain: int = 300
    image_size: int = 32
    seed: int = 0
    in_channels: int = 3

    def validate(self) -> "SyntheticConfig":
        if not 2 <= self.num_classes <= len(GLYPHS):
            raise ConfigurationError(f"classes must be in [2, {len(GLYPHS)}], got {self.num_classes}")
        if self.num_domains < 2:
            raise ConfigurationError(f"domains must be >= 2, got {self.num_domains}")
        if self.per_domain < SYNTH_MIN_PER_DOMAIN:
            raise ConfigurationError(f"per-domain count must be >= {SYNTH_MIN_PER_DOMAIN}, got {self.per_domain}")
        if self.image_size < 8:
            raise ConfigurationError(f"image_size must be >= 8, got {self.image_size}")
        if self.in_channels not in (1, 3):
            raise ConfigurationError(f"in_channels must be 1 or 3, got {self.in_channels}")
        return self


@dataclass(frozen=True, slots=True)
class DomainStyle:
    foreground: torch.Tensor
    background: torch.Tensor
    texture: str
    texture_amplitude: float
    texture_period: float
    thickness: float
    outline: bool
    pixel_noise: float


def _random_color(gen: torch.Generator, channels: int, low: float, high: float) -> torch.Tensor:
    return low + (high - low) * torch.rand(channels, generator=gen)


def domain_style(domain_index: int, config: SyntheticConfig) -> DomainStyle:
    gen = make_generator(derive_seed(config.seed, "style", domain_index))
    dark_on_light = domain_index % 2 == 1
    fg_range, bg_range = ((0.0, 0.35), (0.6, 1.0)) if dark_on_light else ((0.65, 1.0), (0.0, 0.4))
    scale = config.image_size / 32.0
    return DomainStyle(
        foreground=_random_color(gen, config.in_channels, *fg_range),
        background=_random_color(gen, config.in_channels, *bg_range),
        texture=TEXTURES[domain_index % len(TEXTURES)],
        texture_amplitude=float(0.05 + 0.1 * torch.rand(1, generator=gen)),
        texture_period=float(3.0 + 5.0 * torch.rand(1, generator=gen)) * scale,
        thickness=(1.0 + 0.8 * (domain_index % 3)) * scale,
        outline=domain_index % 3 == 2,
        pixel_noise=float(0.02 + 0.04 * torch.rand(1, generator=gen)),
    )


def _filled(name: str, dy: torch.Tensor, dx: torch.Tensor, r: float) -> torch.Tensor:
    if name == "square":
        return torch.maximum(dx.abs(), dy.abs()) < 0.8 * r
    if name == "diamond":
        return dx.abs() + dy.abs() < r
    # triangle, apex up
    return (dy < 0.7 * r) & (dy > -0.8 * r) & (dx.abs() < 0.6 * (dy + 0.8 * r))


def glyph_mask(name: str, dy: torch.Tensor, dx: torch.Tensor, r: float, t: float, outline: bool) -> torch.Tensor:
    """Boolean mask of a glyph centred at dy = dx = 0."""
    base, _, corner = name.partition("_")
    mask = _base_mask(base, dy, dx, r, t, outline)
    if not corner:
        return mask
    if corner not in CORNERS:
        raise ConfigurationError(f"unknown glyph {name!r}")
    sy, sx = CORNERS[corner]
    dot = max(1.2 * t, 0.15 * r)
    return mask | ((dy - sy * 0.95 * r) ** 2 + (dx - sx * 0.95 * r) ** 2 < dot ** 2)


def _base_mask(name: str, dy: torch.Tensor, dx: torch.Tensor, r: float, t: float, outline: bool) -> torch.Tensor:
    if name in ("square", "diamond", "triangle"):
        mask = _filled(name, dy, dx, r)
        if outline:
            mask = mask & ~_filled(name, dy, dx, max(r - 1.5 * t, 0.0))
        return mask
    if name == "ring":
        return (torch.sqrt(dx ** 2 + dy ** 2) - 0.8 * r).abs() < t
    if name == "cross":
        return ((dx.abs() < t) & (dy.abs() < r)) | ((dy.abs() < t) & (dx.abs() < r))
    if name == "saltire":
        return ((dx.abs() - dy.abs()).abs() < t) & (torch.maximum(dx.abs(), dy.abs()) < 0.8 * r)
    period = 2.0 * r / 3.0
    if name == "hbars":
        return (torch.remainder(dy + r, period) < 1.2 * t) & (dx.abs() < r) & (dy.abs() < r)
    if name == "vbars":
        return (torch.remainder(dx + r, period) < 1.2 * t) & (dx.abs() < r) & (dy.abs() < r)
    raise ConfigurationError(f"unknown glyph {name!r}")


def _texture(style: DomainStyle, yy: torch.Tensor, xx: torch.Tensor, gen: torch.Generator) -> torch.Tensor:
    phase = float(torch.rand(1, generator=gen)) * 2.0 * math.pi
    angle = float(torch.rand(1, generator=gen)) * math.pi
    period = style.texture_period
    if style.texture == "stripes":
        pattern = torch.sin(2 * math.pi * (xx * math.cos(angle) + yy * math.sin(angle)) / period + phase)
    elif style.texture == "checker":
        pattern = torch.sign(torch.sin(2 * math.pi * xx / period + phase) * torch.sin(2 * math.pi * yy / period))
    elif style.texture == "noise":
        pattern = torch.randn(yy.shape, generator=gen)
    else:
        pattern = torch.zeros_like(yy)
    return style.texture_amplitude * pattern


def render_sample(
    glyph: str,
    style: DomainStyle,
    image_size: int,
    gen: torch.Generator,
) -> torch.Tensor:
    coords = torch.arange(image_size, dtype=torch.float32) + 0.5
    yy, xx = torch.meshgrid(coords, coords, indexing="ij")
    jitter = 0.12 * image_size
    cy, cx = (image_size / 2 + jitter * (2 * torch.rand(2, generator=gen) - 1)).tolist()
    radius = image_size * float(0.25 + 0.1 * torch.rand(1, generator=gen))
    mask = glyph_mask(glyph, yy - cy, xx - cx, radius, style.thickness, style.outline)

    channels = style.background.shape[0]
    background = style.background.view(channels, 1, 1) + _texture(style, yy, xx, gen).unsqueeze(0)
    tint = 0.1 * (2 * torch.rand(channels, generator=gen) - 1)
    foreground = (style.foreground + tint).view(channels, 1, 1).expand(channels, image_size, image_size)
    image = torch.where(mask.unsqueeze(0), foreground, background)
    image = image + style.pixel_noise * torch.randn(image.shape, generator=gen)
    return image.clamp(0.0, 1.0)


def generate_synthetic(config: SyntheticConfig) -> MultiDomainDataset:
    config.validate()
    classes = GLYPHS[: config.num_classes]
    domains = tuple(f"domain_{d}" for d in range(config.num_domains))
    samples = []
    for d, domain in enumerate(domains):
        style = domain_style(d, config)
        gen = make_generator(derive_seed(config.seed, "samples", d))
        labels = torch.arange(config.per_domain) % config.num_classes
        labels = labels[torch.randperm(config.per_domain, generator=gen)].tolist()
        for index, label in enumerate(labels):
            samples.append(
                Sample(
                    image=render_sample(classes[label], style, config.image_size, gen),
                    label=label,
                    domain=domain,
                    sample_id=f"{domain}/{classes[label]}/{index:05d}.png",
                )
            )
    logger.info(
        "generated %d synthetic samples (%d classes x %d domains)",
        len(samples),
        config.num_classes,
        config.num_domains,
    )
    return MultiDomainDataset(
        classes=tuple(classes),
        domains=domains,
        samples=tuple(samples),
        image_size=config.image_size,
        in_channels=config.in_channels,
    )

