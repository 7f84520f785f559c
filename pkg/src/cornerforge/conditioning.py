"""Generator conditioning: mask-overlaid crops and diffusion text prompts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, EmptyClassName, RegionOutOfBounds
from .imaging import ClassPalette, CropRegion, ensure_image, ensure_mask

PROMPT_SUFFIX = "Nikon D850"

_VOWELS = "aeiou"


@dataclass(frozen=True)
class ConditionedPatch:
    """Crop with the object mask burned in.

    Inside mask_rect every pixel is either the class color (mask bit set) or
    pure black; outside mask_rect the source crop shows through unchanged.
    """

    pixels: np.ndarray
    mask_rect: CropRegion
    mask: np.ndarray
    class_id: int


def compose_condition_patch(crop: np.ndarray, mask: np.ndarray,
                            mask_rect: CropRegion, palette: ClassPalette,
                            class_id: int) -> ConditionedPatch:
    """Burn the class-colored mask plus black surround into a copy of `crop`."""
    ensure_image(crop)
    ensure_mask(mask)
    color = palette.color_of(class_id)
    if mask.shape != (mask_rect.h, mask_rect.w):
        raise DimensionMismatch(
            f"mask is {mask.shape[1]}x{mask.shape[0]}, rect wants {mask_rect.w}x{mask_rect.h}")
    ch, cw = crop.shape[:2]
    if not mask_rect.fits_in(cw, ch):
        raise RegionOutOfBounds(f"mask rect {mask_rect} exceeds crop {cw}x{ch}")
    pixels = crop.copy()
    _kernels.compose_zones(pixels, mask, mask_rect.x, mask_rect.y, color)
    return ConditionedPatch(pixels=pixels, mask_rect=mask_rect, mask=mask.copy(),
                            class_id=class_id)


def classify_zones(patch: ConditionedPatch, crop: np.ndarray,
                   color: tuple[int, int, int]) -> dict:
    """Full-scan self-check of the three-zone rule.

    Returns per-zone pixel counts plus a list of violating coordinates
    (empty when the patch is well-formed). Zone membership is decided by
    position, never by color search.
    """
    r = patch.mask_rect
    px = patch.pixels
    inside = np.zeros(px.shape[:2], dtype=bool)
    inside[r.y:r.y + r.h, r.x:r.x + r.w] = True
    on_mask = np.zeros_like(inside)
    on_mask[r.y:r.y + r.h, r.x:r.x + r.w] = patch.mask

    want = np.where(on_mask[:, :, None],
                    np.asarray(color, dtype=np.uint8),
                    np.where(inside[:, :, None], np.uint8(0), crop))
    bad = np.argwhere((px != want).any(axis=2))
    return {
        "mask_pixels": int(on_mask.sum()),
        "surround_pixels": int(inside.sum() - on_mask.sum()),
        "context_pixels": int((~inside).sum()),
        "violations": [tuple(map(int, yx))[::-1] for yx in bad[:32]],
        "violation_count": int(bad.shape[0]),
    }


def build_prompt(class_name: str) -> str:
    """Camera-style photo prompt with deterministic a/an article choice."""
    if not class_name or not class_name.strip():
        raise EmptyClassName("class name must be non-empty")
    name = class_name.strip()
    article = "an" if name[0].lower() in _VOWELS else "a"
    return f"a photograph of {article} {name}, {PROMPT_SUFFIX}"
