"""Training and sampling configurations.

The defaults are the full production recipe. ``toy()`` profiles shrink
resolution and schedule so the whole loop runs in CI on a CPU.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

PROMPT_SUFFIX = "Nikon D850"
_VOWELS = "aeiou"


@dataclass(frozen=True)
class GanTrainingConfig:
    """Conditional-GAN training recipe.

    The six leading fields are the named production settings. Everything
    after them (L1 weight, Adam betas, batch size, channel width) is kept
    at the defaults of the reference U-Net/patch-discriminator
    implementation this trainer follows.
    """

    resolution: tuple[int, int] = (256, 256)
    epochs: int = 2000
    optimizer: str = "adam"
    initial_lr: float = 2e-4
    lr_schedule: str = "cosine"
    final_lr: float = 2e-6

    l1_weight: float = 100.0
    adam_betas: tuple[float, float] = (0.5, 0.999)
    batch_size: int = 1
    base_channels: int = 64
    seed: int = 0

    def __post_init__(self):
        w, h = self.resolution
        if w != h or w < 16 or w & (w - 1):
            raise ValueError(f"resolution must be square and a power of two >= 16, got {w}x{h}")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.optimizer != "adam":
            raise ValueError(f"unsupported optimizer {self.optimizer!r}")
        if self.lr_schedule not in ("cosine", "constant"):
            raise ValueError(f"unsupported lr schedule {self.lr_schedule!r}")
        if self.initial_lr <= 0 or self.final_lr <= 0:
            raise ValueError("learning rates must be positive")

    @classmethod
    def toy(cls, **overrides) -> "GanTrainingConfig":
        """Small profile: 64x64, 5 epochs, thin channels. Minutes on CPU."""
        base = cls(resolution=(64, 64), epochs=5, batch_size=4, base_channels=8)
        return replace(base, **overrides) if overrides else base

    def to_dict(self) -> dict:
        d = asdict(self)
        d["resolution"] = list(self.resolution)
        d["adam_betas"] = list(self.adam_betas)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GanTrainingConfig":
        d = dict(d)
        d["resolution"] = tuple(d["resolution"])
        d["adam_betas"] = tuple(d.get("adam_betas", (0.5, 0.999)))
        return cls(**d)


@dataclass(frozen=True)
class DiffusionConfig:
    """Image-to-image diffusion sampling settings."""

    sampler: str = "ddim"
    steps: int = 50
    strength: float = 0.9
    guidance_scale: float = 7.0
    resolution: tuple[int, int] = (512, 512)

    def __post_init__(self):
        if self.sampler != "ddim":
            raise ValueError(f"unsupported sampler {self.sampler!r}")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError("strength must lie in [0, 1]")
        if self.guidance_scale < 0:
            raise ValueError("guidance scale must be >= 0")

    @classmethod
    def toy(cls, **overrides) -> "DiffusionConfig":
        base = cls(steps=8, resolution=(64, 64))
        return replace(base, **overrides) if overrides else base

    def to_dict(self) -> dict:
        d = asdict(self)
        d["resolution"] = list(self.resolution)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DiffusionConfig":
        d = dict(d)
        d["resolution"] = tuple(d["resolution"])
        return cls(**d)


def cosine_lr(cfg: GanTrainingConfig, epoch: int) -> float:
    """Learning rate for ``epoch`` (0-based) under the config's schedule.

    The cosine schedule starts exactly at ``initial_lr`` and lands exactly
    on ``final_lr`` at the last epoch.
    """
    if not 0 <= epoch < cfg.epochs:
        raise ValueError(f"epoch {epoch} outside schedule of {cfg.epochs}")
    if cfg.lr_schedule == "constant" or cfg.epochs == 1:
        return cfg.initial_lr
    progress = epoch / (cfg.epochs - 1)
    span = cfg.initial_lr - cfg.final_lr
    return cfg.final_lr + span * 0.5 * (1.0 + math.cos(math.pi * progress))


def build_prompt(class_name: str) -> str:
    """Camera-style photo prompt carried on diffusion wire requests.

    Matches the pipeline client's prompt scheme exactly: deterministic
    a/an choice, class name case preserved.
    """
    if not class_name or not class_name.strip():
        raise ValueError("class name must be non-empty")
    name = class_name.strip()
    article = "an" if name[0].lower() in _VOWELS else "a"
    return f"a photograph of {article} {name}, {PROMPT_SUFFIX}"
