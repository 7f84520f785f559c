"""Deterministic placement sampling and inpainting crop geometry.

A placement is a pure function of (seed, background dims, object mask, config):
the same inputs always give the same placement, so plans can be re-derived and
executed by any number of workers without changing the output.

Draw order from the per-placement stream (fixed, part of the contract):
center_x, center_y, mask scale, mask_rect x, mask_rect y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BackgroundTooSmall, EmptyMask
from .imaging import CropRegion, ensure_mask
from .rng import SplitMix64


@dataclass(frozen=True)
class PlacementConfig:
    """Geometry knobs for object placement.

    vertical_fraction caps the object center: center_y <= fraction * height.
    mask_scale_range bounds the scaled mask's longer side as a fraction of
    crop_size; the mask always stays strictly smaller than the crop.
    edge_margin keeps centers away from the image border.
    """

    vertical_fraction: float = 0.5
    crop_size: int = 256
    mask_scale_range: tuple[float, float] = (0.05, 0.5)
    edge_margin: int = 0

    def __post_init__(self):
        lo, hi = self.mask_scale_range
        if not (0 < lo <= hi < 1):
            raise ValueError(f"mask_scale_range must satisfy 0 < min <= max < 1, got {lo}, {hi}")
        if not (0 < self.vertical_fraction <= 1):
            raise ValueError(f"vertical_fraction must be in (0, 1], got {self.vertical_fraction}")
        if self.crop_size < 16:
            raise ValueError(f"crop_size must be >= 16, got {self.crop_size}")
        if self.edge_margin < 0:
            raise ValueError("edge_margin must be >= 0")


@dataclass(frozen=True)
class Placement:
    """One object's placement: where it sits and what gets cropped around it."""

    object_ref: str
    class_id: int
    center: tuple[int, int]
    mask_dims: tuple[int, int]
    mask_rect: CropRegion
    crop: CropRegion
    seed: int

    def to_dict(self) -> dict:
        return {
            "object_ref": self.object_ref,
            "class_id": self.class_id,
            "center": list(self.center),
            "mask_dims": list(self.mask_dims),
            "mask_rect": self.mask_rect.to_dict(),
            "crop": self.crop.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Placement":
        return cls(
            object_ref=d["object_ref"],
            class_id=int(d["class_id"]),
            center=(int(d["center"][0]), int(d["center"][1])),
            mask_dims=(int(d["mask_dims"][0]), int(d["mask_dims"][1])),
            mask_rect=CropRegion.from_dict(d["mask_rect"]),
            crop=CropRegion.from_dict(d["crop"]),
            seed=int(d["seed"]),
        )


def derive_crop(center: tuple[int, int], crop_size: int,
                background_dims: tuple[int, int]) -> CropRegion:
    """Square crop nominally centered on `center`, shifted inward at borders."""
    w, h = background_dims
    if crop_size > w or crop_size > h:
        raise BackgroundTooSmall(
            f"crop {crop_size} does not fit in background {w}x{h}")
    cx, cy = center
    half = crop_size // 2
    x0 = min(max(cx - half, 0), w - crop_size)
    y0 = min(max(cy - half, 0), h - crop_size)
    return CropRegion(x0, y0, crop_size, crop_size)


def scaled_mask_dims(mask_shape: tuple[int, int], long_side: int) -> tuple[int, int]:
    """Target (w, h) with the longer side equal to long_side, aspect preserved."""
    sh, sw = mask_shape
    if sw >= sh:
        mw = long_side
        mh = max(1, round(long_side * sh / sw))
    else:
        mh = long_side
        mw = max(1, round(long_side * sw / sh))
    return mw, mh


def sample_placement(seed: int, background_dims: tuple[int, int],
                     obj: tuple[str, int, np.ndarray],
                     cfg: PlacementConfig) -> Placement:
    """Sample where one object goes on a background.

    `obj` is (object_ref, class_id, source mask). The center lands uniformly
    in the allowed band, the crop is derived around it, and the scaled mask
    rectangle lands uniformly inside the crop.
    """
    object_ref, class_id, mask = obj
    ensure_mask(mask)
    if not mask.any():
        raise EmptyMask(f"object {object_ref!r} has an empty mask")

    w, h = background_dims
    m = cfg.edge_margin
    if cfg.crop_size > w or cfg.crop_size > h:
        raise BackgroundTooSmall(
            f"background {w}x{h} smaller than crop {cfg.crop_size}")
    x_lo, x_hi = m, w - 1 - m
    y_lo = m
    y_hi = min(int(cfg.vertical_fraction * h), h - 1 - m)
    if x_hi < x_lo or y_hi < y_lo:
        raise BackgroundTooSmall(
            f"background {w}x{h} leaves no center band with margin {m}")

    rng = SplitMix64(seed)
    cx = rng.next_int(x_lo, x_hi)
    cy = rng.next_int(y_lo, y_hi)

    lo, hi = cfg.mask_scale_range
    frac = rng.next_uniform(lo, hi)
    long_side = round(frac * cfg.crop_size)
    long_side = max(1, min(long_side, cfg.crop_size - 1))
    mw, mh = scaled_mask_dims(mask.shape, long_side)

    rx = rng.next_below(cfg.crop_size - mw + 1)
    ry = rng.next_below(cfg.crop_size - mh + 1)

    crop = derive_crop((cx, cy), cfg.crop_size, background_dims)
    return Placement(
        object_ref=object_ref,
        class_id=class_id,
        center=(cx, cy),
        mask_dims=(mw, mh),
        mask_rect=CropRegion(rx, ry, mw, mh),
        crop=crop,
        seed=seed,
    )
