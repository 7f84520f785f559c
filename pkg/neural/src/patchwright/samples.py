"""Training pairs for the conditional generator.

A sample couples a conditioned frame ``x`` with its untouched original
``y``. Inside the object rectangle, ``x`` shows the class color where the
segmentation mask is set and pure black elsewhere; outside the rectangle
``x`` equals ``y`` pixel for pixel. That is the same three-zone layout the
pipeline sends over the wire at inference time, so training input and
serving input agree by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GeometryError(ValueError):
    """Mask or rectangle does not fit the frame it is applied to."""


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise GeometryError(f"rect sides must be positive, got {self.w}x{self.h}")

    def fits_in(self, width: int, height: int) -> bool:
        return self.x >= 0 and self.y >= 0 and self.x + self.w <= width and self.y + self.h <= height


class Palette:
    """Ordered class list; list index is the class id."""

    def __init__(self, entries):
        entries = list(entries)
        if not entries:
            raise ValueError("palette needs at least one class")
        self.names = [name for name, _ in entries]
        self.colors = [tuple(int(c) for c in color) for _, color in entries]
        for color in self.colors:
            if len(color) != 3 or not all(0 <= c <= 255 for c in color):
                raise ValueError(f"bad palette color {color}")

    def __len__(self) -> int:
        return len(self.names)

    def color_of(self, class_id: int) -> tuple[int, int, int]:
        if not 0 <= class_id < len(self.colors):
            raise ValueError(f"class id {class_id} outside palette of {len(self)}")
        return self.colors[class_id]


# Conditioning colors used by the dataset pipeline; the generator must be
# trained on the exact colors it will be queried with.
DEFAULT_PALETTE = Palette([
    ("Large Airplane", (255, 0, 0)),
    ("Small Airplane", (0, 255, 0)),
    ("Very Small Airplane", (0, 0, 255)),
    ("Helicopter", (255, 255, 0)),
    ("Drone", (255, 0, 255)),
    ("Hot Air Balloon", (0, 255, 255)),
    ("Paraglider", (255, 255, 255)),
    ("Airship", (255, 128, 0)),
])


@dataclass(frozen=True)
class TrainingSample:
    """Conditioned input ``x`` and ground-truth frame ``y``, same dims."""

    x: np.ndarray
    y: np.ndarray
    rect: Rect
    class_id: int


def _ensure_frame(frame: np.ndarray, name: str) -> None:
    if not (isinstance(frame, np.ndarray) and frame.ndim == 3
            and frame.shape[2] == 3 and frame.dtype == np.uint8):
        raise ValueError(f"{name} must be an HxWx3 uint8 array")


def build_training_sample(frame: np.ndarray, mask: np.ndarray, rect: Rect,
                          palette: Palette, class_id: int) -> TrainingSample:
    """Burn the class-colored mask and black surround into a copy of ``frame``."""
    _ensure_frame(frame, "frame")
    if mask.dtype != bool or mask.ndim != 2:
        raise ValueError("mask must be a 2-d boolean array")
    if mask.shape != (rect.h, rect.w):
        raise GeometryError(
            f"mask is {mask.shape[1]}x{mask.shape[0]}, rect wants {rect.w}x{rect.h}")
    h, w = frame.shape[:2]
    if not rect.fits_in(w, h):
        raise GeometryError(f"rect {rect} exceeds frame {w}x{h}")

    x = frame.copy()
    window = x[rect.y:rect.y + rect.h, rect.x:rect.x + rect.w]
    window[:] = 0
    window[mask] = np.asarray(palette.color_of(class_id), dtype=np.uint8)
    return TrainingSample(x=x, y=frame.copy(), rect=rect, class_id=class_id)


def conditioned_rect_of(x: np.ndarray, y: np.ndarray) -> Rect:
    """Recover the conditioned rectangle as the tight box of ``x != y``.

    Used when loading sample pairs from disk, where the rectangle is not
    stored separately.
    """
    _ensure_frame(x, "x")
    _ensure_frame(y, "y")
    if x.shape != y.shape:
        raise GeometryError(f"pair dims differ: {x.shape} vs {y.shape}")
    diff = (x != y).any(axis=2)
    ys, xs = np.nonzero(diff)
    if ys.size == 0:
        raise GeometryError("pair is identical everywhere; no conditioned region")
    x0, y0 = int(xs.min()), int(ys.min())
    return Rect(x0, y0, int(xs.max()) - x0 + 1, int(ys.max()) - y0 + 1)
