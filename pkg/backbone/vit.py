"""
Tiny vision transformer whose forward pass can read the class token after
any block through one shared classifier head.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from einops import rearrange
from einops.layers.torch import Rearrange
from torch import nn

from config import INIT_STD
from models import BackboneConfig, ConfigurationError, DimensionError


@dataclass(slots=True)
class TapOutput:
    final_logits: torch.Tensor
    tapped_logits: torch.Tensor
    tapped_block_index: int


class MLP(nn.Module):
    def __init__(self, dim: int, hidden_dim: int) -> None:
        super().__init__()
        self.norm = nn.LayerNorm(dim)
        self.fc1 = nn.Linear(dim, hidden_dim)
        self.act = nn.GELU()
        self.fc2 = nn.Linear(hidden_dim, dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.fc2(self.act(self.fc1(self.norm(x))))


class Attention(nn.Module):
    def __init__(self, dim: int, heads: int) -> None:
        super().__init__()
        self.heads = heads
        self.scale = (dim // heads) ** -0.5
        self.norm = nn.LayerNorm(dim)
        self.qkv = nn.Linear(dim, dim * 3)
        self.proj = nn.Linear(dim, dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        q, k, v = self.qkv(self.norm(x)).chunk(3, dim=-1)
        q, k, v = (rearrange(t, "b n (h d) -> b h n d", h=self.heads) for t in (q, k, v))
        attn = torch.softmax(torch.matmul(q, k.transpose(-1, -2)) * self.scale, dim=-1)
        out = rearrange(torch.matmul(attn, v), "b h n d -> b n (h d)")
        return self.proj(out)


class Block(nn.Module):
    """Pre-norm transformer block with residual attention and MLP."""

    def __init__(self, dim: int, heads: int, mlp_ratio: float) -> None:
        super().__init__()
        self.attn = Attention(dim, heads)
        self.mlp = MLP(dim, int(round(dim * mlp_ratio)))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self.attn(x)
        return x + self.mlp(x)


class VisionTransformer(nn.Module):
    def __init__(self, config: BackboneConfig) -> None:
        super().__init__()
        config.validate()
        self.config = config
        patch_dim = config.in_channels * config.patch_size ** 2

        self.patch_embed = nn.Sequential(
            Rearrange(
                "b c (h p1) (w p2) -> b (h w) (p1 p2 c)",
                p1=config.patch_size,
                p2=config.patch_size,
            ),
            nn.Linear(patch_dim, config.embed_dim),
        )
        self.cls_token = nn.Parameter(torch.zeros(1, 1, config.embed_dim))
        self.pos_embedding = nn.Parameter(torch.zeros(1, config.token_count, config.embed_dim))
        self.blocks = nn.ModuleList(
            [Block(config.embed_dim, config.heads, config.mlp_ratio) for _ in range(config.depth)]
        )
        # Shared by every tap point: l_i and l_n both go through norm + head.
        self.norm = nn.LayerNorm(config.embed_dim)
        self.head = nn.Linear(config.embed_dim, config.num_classes)

        self._init_parameters()

    @staticmethod
    def _init_module(module: nn.Module) -> None:
        if isinstance(module, nn.Linear):
            nn.init.trunc_normal_(module.weight, mean=0.0, std=INIT_STD)
            if module.bias is not None:
                nn.init.zeros_(module.bias)
        elif isinstance(module, nn.LayerNorm):
            nn.init.ones_(module.weight)
            nn.init.zeros_(module.bias)

    def _init_parameters(self) -> None:
        self.apply(self._init_module)
        nn.init.trunc_normal_(self.cls_token, mean=0.0, std=INIT_STD)
        nn.init.trunc_normal_(self.pos_embedding, mean=0.0, std=INIT_STD)

    @property
    def depth(self) -> int:
        return len(self.blocks)

    def _check_images(self, images: torch.Tensor) -> torch.Tensor:
        cfg = self.config
        expected = (cfg.in_channels, cfg.image_size, cfg.image_size)
        if images.ndim != 4 or tuple(images.shape[1:]) != expected:
            raise DimensionError(
                f"expected images of shape (B, {expected[0]}, {expected[1]}, {expected[2]}), "
                f"got {tuple(images.shape)}"
            )
        if images.shape[0] == 0:
            raise DimensionError("image batch is empty")
        return images.to(self.cls_token.dtype)

    def embed(self, images: torch.Tensor) -> torch.Tensor:
        tokens = self.patch_embed(self._check_images(images))
        cls = self.cls_token.expand(tokens.shape[0], -1, -1)
        return torch.cat([cls, tokens], dim=1) + self.pos_embedding

    def classify(self, hidden: torch.Tensor) -> torch.Tensor:
        """Shared classifier fc applied to the class-token row."""
        return self.head(self.norm(hidden[:, 0]))

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        hidden = self.embed(images)
        for block in self.blocks:
            hidden = block(hidden)
        return self.classify(hidden)

    def forward_with_tap(self, images: torch.Tensor, block_index: int) -> TapOutput:
        if not 1 <= block_index <= self.depth - 1:
            raise IndexError(
                f"tap block index must be in [1, {self.depth - 1}], got {block_index}"
            )
        hidden = self.embed(images)
        tapped = None
        for index, block in enumerate(self.blocks, start=1):
            hidden = block(hidden)
            if index == block_index:
                tapped = self.classify(hidden)
        return TapOutput(
            final_logits=self.classify(hidden),
            tapped_logits=tapped,
            tapped_block_index=block_index,
        )


def init_model(config: BackboneConfig) -> VisionTransformer:
    """Build a model whose parameters depend only on config (seed included)."""
    config.validate()
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(config.seed)
        return VisionTransformer(config)


def forward_final(model: VisionTransformer, images: torch.Tensor) -> torch.Tensor:
    """l_n for a batch: logits from the final block."""
    return model(images)


def forward_with_tap(model: VisionTransformer, images: torch.Tensor, block_index: int) -> TapOutput:
    """l_n and l_i from one forward pass."""
    return model.forward_with_tap(images, block_index)


def sample_block_index(
    rng: torch.Generator,
    depth: int,
    low: int = 1,
    high: int | None = None,
) -> int:
    """Uniform draw over the intermediate blocks {low, ..., high}, high defaulting to depth - 1."""
    if depth < 2:
        raise ConfigurationError(f"depth must be >= 2 to sample an intermediate block, got {depth}")
    high = depth - 1 if high is None else high
    if not 1 <= low <= high <= depth - 1:
        raise ConfigurationError(f"tap block range [{low}, {high}] outside [1, {depth - 1}]")
    return int(torch.randint(low, high + 1, (1,), generator=rng).item())
