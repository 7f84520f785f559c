"""Conditional-GAN training loop.

The generator and the discriminator are trained together: each batch
first updates the discriminator on (condition, real) vs (condition,
generated) pairs, then updates the generator on the adversarial logits
plus an L1 reconstruction term. Per-epoch losses and the scheduled
learning rate are recorded in the training log; the mean unweighted L1
to ground truth is the reconstruction figure quality gates look at.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .configs import GanTrainingConfig, cosine_lr
from .models import PatchDiscriminator, UNetGenerator
from .samples import DEFAULT_PALETTE, Palette, Rect, TrainingSample, build_training_sample

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "patchwright-cgan-v1"


class EmptyDataset(ValueError):
    """Training requires at least one sample."""


class ResolutionMismatch(ValueError):
    """A sample's dimensions differ from the configured resolution."""


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    lr: float
    loss_d: float
    loss_g_gan: float
    recon_l1: float


@dataclass
class TrainingRun:
    generator: UNetGenerator
    discriminator: PatchDiscriminator
    config: GanTrainingConfig
    log: list[EpochStats] = field(default_factory=list)
    seconds: float = 0.0


def _to_tensor(img: np.ndarray) -> torch.Tensor:
    """HxWx3 uint8 -> 3xHxW float in [-1, 1]."""
    arr = img.astype(np.float32) / 127.5 - 1.0
    return torch.from_numpy(arr.transpose(2, 0, 1))


def to_image(t: torch.Tensor) -> np.ndarray:
    """3xHxW float in [-1, 1] -> HxWx3 uint8."""
    arr = (t.detach().cpu().numpy().transpose(1, 2, 0) + 1.0) * 127.5
    return np.clip(np.rint(arr), 0, 255).astype(np.uint8)


def _stack_samples(samples, cfg: GanTrainingConfig) -> tuple[torch.Tensor, torch.Tensor]:
    if not samples:
        raise EmptyDataset("no training samples given")
    w, h = cfg.resolution
    xs, ys = [], []
    for i, s in enumerate(samples):
        if s.x.shape != (h, w, 3) or s.y.shape != (h, w, 3):
            raise ResolutionMismatch(
                f"sample {i} is {s.x.shape[1]}x{s.x.shape[0]}, config wants {w}x{h}")
        xs.append(_to_tensor(s.x))
        ys.append(_to_tensor(s.y))
    return torch.stack(xs), torch.stack(ys)


def train_gan(samples, cfg: GanTrainingConfig, device: str = "cpu") -> TrainingRun:
    """Train generator and discriminator on conditioned/original pairs."""
    x_all, y_all = _stack_samples(samples, cfg)
    torch.manual_seed(cfg.seed)
    dev = torch.device(device)
    x_all, y_all = x_all.to(dev), y_all.to(dev)

    side = cfg.resolution[0]
    gen = UNetGenerator(side=side, base_channels=cfg.base_channels).to(dev)
    disc = PatchDiscriminator(base_channels=cfg.base_channels).to(dev)
    opt_g = torch.optim.Adam(gen.parameters(), lr=cfg.initial_lr, betas=cfg.adam_betas)
    opt_d = torch.optim.Adam(disc.parameters(), lr=cfg.initial_lr, betas=cfg.adam_betas)
    bce = nn.BCEWithLogitsLoss()
    l1 = nn.L1Loss()
    shuffler = torch.Generator().manual_seed(cfg.seed)

    run = TrainingRun(generator=gen, discriminator=disc, config=cfg)
    started = time.monotonic()
    n = x_all.shape[0]
    for epoch in range(cfg.epochs):
        lr = cosine_lr(cfg, epoch)
        for group in (*opt_g.param_groups, *opt_d.param_groups):
            group["lr"] = lr

        order = torch.randperm(n, generator=shuffler)
        sums = {"d": 0.0, "gan": 0.0, "l1": 0.0}
        batches = 0
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            x, y = x_all[idx], y_all[idx]
            fake = gen(x)

            opt_d.zero_grad()
            logits_real = disc(x, y)
            logits_fake = disc(x, fake.detach())
            loss_d = 0.5 * (bce(logits_real, torch.ones_like(logits_real))
                            + bce(logits_fake, torch.zeros_like(logits_fake)))
            loss_d.backward()
            opt_d.step()

            opt_g.zero_grad()
            logits = disc(x, fake)
            loss_gan = bce(logits, torch.ones_like(logits))
            loss_l1 = l1(fake, y)
            (loss_gan + cfg.l1_weight * loss_l1).backward()
            opt_g.step()

            sums["d"] += loss_d.item()
            sums["gan"] += loss_gan.item()
            sums["l1"] += loss_l1.item()
            batches += 1

        stats = EpochStats(epoch=epoch, lr=lr, loss_d=sums["d"] / batches,
                           loss_g_gan=sums["gan"] / batches,
                           recon_l1=sums["l1"] / batches)
        run.log.append(stats)
        log.info("epoch %d/%d lr=%.2e loss_d=%.4f loss_g_gan=%.4f recon_l1=%.4f",
                 epoch + 1, cfg.epochs, lr, stats.loss_d, stats.loss_g_gan,
                 stats.recon_l1)
    run.seconds = time.monotonic() - started
    gen.eval()
    disc.eval()
    return run


def save_checkpoint(run: TrainingRun, path) -> None:
    torch.save({
        "format": CHECKPOINT_FORMAT,
        "config": run.config.to_dict(),
        "generator": run.generator.state_dict(),
        "log": [vars(s) for s in run.log],
    }, path)


def load_generator(path, device: str = "cpu") -> tuple[UNetGenerator, GanTrainingConfig]:
    blob = torch.load(path, map_location=device, weights_only=True)
    if blob.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path} is not a {CHECKPOINT_FORMAT} checkpoint")
    cfg = GanTrainingConfig.from_dict(blob["config"])
    gen = UNetGenerator(side=cfg.resolution[0], base_channels=cfg.base_channels)
    gen.load_state_dict(blob["generator"])
    gen.to(device).eval()
    return gen, cfg


def synthetic_training_set(count: int, resolution: int = 64,
                           palette: Palette = DEFAULT_PALETTE,
                           seed: int = 0) -> list[TrainingSample]:
    """Procedural sky frames with elliptical object silhouettes.

    Stands in for real annotated footage in smoke tests and the toy
    training profile; every sample is a valid conditioned/original pair.
    """
    rng = np.random.default_rng(seed)
    side = resolution
    samples = []
    for _ in range(count):
        top = rng.uniform(90, 150, size=3)
        bottom = rng.uniform(160, 235, size=3)
        ramp = np.linspace(0.0, 1.0, side)[:, None, None]
        frame = top[None, None, :] * (1 - ramp) + bottom[None, None, :] * ramp
        frame = frame + rng.normal(0.0, 2.0, size=(side, side, 3))
        frame = np.clip(frame, 0, 255).astype(np.uint8)

        rw = int(rng.integers(side // 8, side // 3 + 1))
        rh = int(rng.integers(side // 8, side // 3 + 1))
        rx = int(rng.integers(0, side - rw + 1))
        ry = int(rng.integers(0, side // 2))
        yy, xx = np.mgrid[0:rh, 0:rw]
        cy, cx = (rh - 1) / 2.0, (rw - 1) / 2.0
        mask = ((xx - cx) / (rw / 2.0)) ** 2 + ((yy - cy) / (rh / 2.0)) ** 2 <= 1.0

        class_id = int(rng.integers(0, len(palette)))
        samples.append(build_training_sample(
            frame, mask, Rect(rx, ry, rw, rh), palette, class_id))
    return samples
