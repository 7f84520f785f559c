"""Neural generation service for mask-conditioned inpainting.

Trains a conditional GAN (U-Net generator, patch discriminator) on
condition/ground-truth frame pairs and serves it — or a DDIM
image-to-image sampler — over the HTTP patch generation protocol.
"""

from .configs import DiffusionConfig, GanTrainingConfig, build_prompt, cosine_lr
from .samples import (
    DEFAULT_PALETTE,
    GeometryError,
    Palette,
    Rect,
    TrainingSample,
    build_training_sample,
)
from .training import (
    EmptyDataset,
    ResolutionMismatch,
    TrainingRun,
    load_generator,
    save_checkpoint,
    synthetic_training_set,
    train_gan,
)
from .diffusion import DdimSampler, PromptEncoder, ToyDenoiser
from .server import CganEngine, DiffusionEngine, GenerationServer

__version__ = "0.1.0"

__all__ = [
    "DiffusionConfig",
    "GanTrainingConfig",
    "build_prompt",
    "cosine_lr",
    "DEFAULT_PALETTE",
    "GeometryError",
    "Palette",
    "Rect",
    "TrainingSample",
    "build_training_sample",
    "EmptyDataset",
    "ResolutionMismatch",
    "TrainingRun",
    "load_generator",
    "save_checkpoint",
    "synthetic_training_set",
    "train_gan",
    "DdimSampler",
    "PromptEncoder",
    "ToyDenoiser",
    "CganEngine",
    "DiffusionEngine",
    "GenerationServer",
]
