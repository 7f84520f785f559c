"""DDIM image-to-image sampling with classifier-free guidance.

The sampler is model-agnostic: it drives any epsilon-predictor
``model(x_t, t_frac, cond)`` through the deterministic DDIM update
(eta = 0). ``strength`` controls how far the input is noised before
denoising begins — 0 returns the input untouched, 1 starts from the top
of the schedule. Guidance mixes a conditional and an unconditional
prediction in the usual way.

``ToyDenoiser`` is a deliberately small backbone for wiring, protocol,
and shape tests; it makes no claim of producing photographic output.
Production use loads a trained predictor checkpoint instead.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np
import torch
from torch import nn

from .configs import DiffusionConfig

TRAIN_TIMESTEPS = 1000


class PromptEncoder:
    """Deterministic hash-based bag-of-tokens embedding.

    Stands in for a learned text encoder: the same prompt always maps to
    the same unit vector, different prompts almost surely differ, and the
    empty prompt is the zero vector used for unconditional guidance.
    """

    def __init__(self, dim: int = 64):
        self.dim = dim

    def encode(self, text: str) -> torch.Tensor:
        text = (text or "").strip().lower()
        if not text:
            return torch.zeros(self.dim)
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in text.split():
            digest = hashlib.sha256(token.encode("utf-8")).digest()
            token_rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
            vec += token_rng.standard_normal(self.dim)
        vec /= np.linalg.norm(vec)
        return torch.from_numpy(vec.astype(np.float32))


def _time_embedding(t_frac: torch.Tensor, dim: int) -> torch.Tensor:
    """Sinusoidal embedding of the normalized timestep, shape (B, dim)."""
    half = dim // 2
    freqs = torch.exp(torch.arange(half, dtype=torch.float32)
                      * (-math.log(10000.0) / max(half - 1, 1)))
    angles = t_frac[:, None] * freqs[None, :] * 1000.0
    return torch.cat([torch.sin(angles), torch.cos(angles)], dim=1)


class ToyDenoiser(nn.Module):
    """Minimal epsilon-predictor: two conv layers with FiLM conditioning."""

    TIME_DIM = 16

    def __init__(self, channels: int = 16, cond_dim: int = 64):
        super().__init__()
        self.cond_dim = cond_dim
        self.conv_in = nn.Conv2d(3, channels, 3, 1, 1)
        self.film = nn.Linear(self.TIME_DIM + cond_dim, channels * 2)
        self.conv_mid = nn.Conv2d(channels, channels, 3, 1, 1)
        self.conv_out = nn.Conv2d(channels, 3, 3, 1, 1)

    def forward(self, x: torch.Tensor, t_frac: torch.Tensor,
                cond: torch.Tensor) -> torch.Tensor:
        temb = _time_embedding(t_frac, self.TIME_DIM)
        scale, shift = self.film(torch.cat([temb, cond], dim=1)).chunk(2, dim=1)
        h = torch.relu(self.conv_in(x))
        h = h * (1.0 + scale[:, :, None, None]) + shift[:, :, None, None]
        h = torch.relu(self.conv_mid(h))
        return self.conv_out(h)


class DdimSampler:
    def __init__(self, config: DiffusionConfig, model: nn.Module,
                 encoder: PromptEncoder | None = None, device: str = "cpu"):
        self.config = config
        self.model = model.to(device).eval()
        self.encoder = encoder
        self.device = torch.device(device)
        betas = np.linspace(1e-4, 2e-2, TRAIN_TIMESTEPS, dtype=np.float64)
        self.alpha_bar = np.cumprod(1.0 - betas)
        self.taus = np.round(
            np.linspace(0, TRAIN_TIMESTEPS - 1, config.steps)).astype(int)

    def _eps(self, x: torch.Tensor, t_frac: torch.Tensor, cond: torch.Tensor,
             uncond: torch.Tensor) -> torch.Tensor:
        eps_cond = self.model(x, t_frac, cond)
        scale = self.config.guidance_scale
        if self.encoder is None or scale == 1.0:
            return eps_cond
        eps_uncond = self.model(x, t_frac, uncond)
        return eps_uncond + scale * (eps_cond - eps_uncond)

    @torch.no_grad()
    def img2img(self, image: torch.Tensor, prompt: str = "", seed: int = 0,
                noise: torch.Tensor | None = None) -> torch.Tensor:
        """Denoise a partially renoised image; returns the same shape.

        ``image`` is 3xHxW in [-1, 1]. ``noise``, when given, replaces the
        seeded gaussian used to push the image up the schedule (tests use
        zeros to verify the update equations leave a clean trajectory
        untouched).
        """
        if image.ndim != 3 or image.shape[0] != 3:
            raise ValueError(f"expected a 3xHxW tensor, got {tuple(image.shape)}")
        t_enc = int(round(self.config.strength * self.config.steps))
        if t_enc == 0:
            return image.clone()

        x = image[None].to(self.device, dtype=torch.float32)
        if self.encoder is not None:
            cond = self.encoder.encode(prompt)[None].to(self.device)
            uncond = self.encoder.encode("")[None].to(self.device)
        else:
            dim = getattr(self.model, "cond_dim", 64)
            cond = uncond = torch.zeros((1, dim), device=self.device)

        if noise is None:
            gen = torch.Generator(self.device.type).manual_seed(seed)
            eps0 = torch.randn(x.shape, generator=gen, device=self.device)
        else:
            eps0 = noise[None].to(self.device, dtype=torch.float32)
        ab_start = self.alpha_bar[self.taus[t_enc - 1]]
        x = math.sqrt(ab_start) * x + math.sqrt(1.0 - ab_start) * eps0

        for i in range(t_enc - 1, -1, -1):
            t = int(self.taus[i])
            ab_t = self.alpha_bar[t]
            ab_prev = self.alpha_bar[self.taus[i - 1]] if i > 0 else 1.0
            t_frac = torch.full((1,), t / (TRAIN_TIMESTEPS - 1),
                                device=self.device)
            eps = self._eps(x, t_frac, cond, uncond)
            x0_pred = (x - math.sqrt(1.0 - ab_t) * eps) / math.sqrt(ab_t)
            x = math.sqrt(ab_prev) * x0_pred + math.sqrt(1.0 - ab_prev) * eps
        return x[0].clamp(-1.0, 1.0).cpu()
