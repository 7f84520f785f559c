"""U-Net generator and patch discriminator.

Architecture follows the standard conditional image-to-image design: the
generator downsamples to a 1x1 bottleneck with skip connections back up,
the discriminator judges overlapping patches of the (condition, image)
pair. Channel widths double per stage and cap at eight times the base.
"""

from __future__ import annotations

import torch
from torch import nn


def _init_weights(module: nn.Module) -> None:
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.ConvTranspose2d)):
            nn.init.normal_(m.weight, 0.0, 0.02)
            if m.bias is not None:
                nn.init.zeros_(m.bias)
        elif isinstance(m, nn.BatchNorm2d):
            nn.init.normal_(m.weight, 1.0, 0.02)
            nn.init.zeros_(m.bias)


def _channel_plan(side: int, base: int) -> list[int]:
    downs = side.bit_length() - 1  # side is a power of two; halve until 1x1
    return [min(base * 2 ** i, base * 8) for i in range(downs)]


class UNetGenerator(nn.Module):
    def __init__(self, side: int = 256, base_channels: int = 64,
                 in_channels: int = 3, out_channels: int = 3):
        super().__init__()
        if side < 16 or side & (side - 1):
            raise ValueError(f"side must be a power of two >= 16, got {side}")
        self.side = side
        plan = _channel_plan(side, base_channels)

        self.downs = nn.ModuleList()
        prev = in_channels
        for i, ch in enumerate(plan):
            block = [nn.Conv2d(prev, ch, 4, 2, 1, bias=i == 0 or i == len(plan) - 1)]
            if 0 < i < len(plan) - 1:
                block.insert(0, nn.LeakyReLU(0.2, inplace=True))
                block.append(nn.BatchNorm2d(ch))
            elif i == len(plan) - 1:
                block.insert(0, nn.LeakyReLU(0.2, inplace=True))
            self.downs.append(nn.Sequential(*block))
            prev = ch

        self.ups = nn.ModuleList()
        for i in range(len(plan) - 1, 0, -1):
            in_ch = plan[i] if i == len(plan) - 1 else plan[i] * 2
            out_ch = plan[i - 1]
            block = [nn.ReLU(inplace=True),
                     nn.ConvTranspose2d(in_ch, out_ch, 4, 2, 1, bias=False),
                     nn.BatchNorm2d(out_ch)]
            if i >= len(plan) - 3:
                block.append(nn.Dropout(0.5))
            self.ups.append(nn.Sequential(*block))
        self.final = nn.Sequential(
            nn.ReLU(inplace=True),
            nn.ConvTranspose2d(plan[0] * 2, out_channels, 4, 2, 1),
            nn.Tanh(),
        )
        _init_weights(self)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        skips = []
        for down in self.downs:
            x = down(x)
            skips.append(x)
        skips.pop()  # bottleneck output is not a skip
        for up in self.ups:
            x = up(x)
            x = torch.cat([x, skips.pop()], dim=1)
        return self.final(x)


class PatchDiscriminator(nn.Module):
    """Maps a (condition, image) pair to a grid of real/fake logits."""

    def __init__(self, base_channels: int = 64, in_channels: int = 6,
                 n_layers: int = 3):
        super().__init__()
        layers = [nn.Conv2d(in_channels, base_channels, 4, 2, 1),
                  nn.LeakyReLU(0.2, inplace=True)]
        ch = base_channels
        for i in range(1, n_layers):
            nxt = min(base_channels * 2 ** i, base_channels * 8)
            layers += [nn.Conv2d(ch, nxt, 4, 2, 1, bias=False),
                       nn.BatchNorm2d(nxt),
                       nn.LeakyReLU(0.2, inplace=True)]
            ch = nxt
        nxt = min(base_channels * 2 ** n_layers, base_channels * 8)
        layers += [nn.Conv2d(ch, nxt, 4, 1, 1, bias=False),
                   nn.BatchNorm2d(nxt),
                   nn.LeakyReLU(0.2, inplace=True),
                   nn.Conv2d(nxt, 1, 4, 1, 1)]
        self.net = nn.Sequential(*layers)
        _init_weights(self)

    def forward(self, condition: torch.Tensor, image: torch.Tensor) -> torch.Tensor:
        return self.net(torch.cat([condition, image], dim=1))
