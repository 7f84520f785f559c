"""Raster primitives: crops, merges, masks, boxes, and the class palette.

Images are numpy arrays of shape (height, width, 3), dtype uint8, RGB.
Binary masks are numpy bool arrays of shape (height, width). Boxes use
continuous semantics: BBox(x, y, w, h) covers [x, x+w) x [y, y+h).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import _kernels
from .errors import DimensionMismatch, EmptyMask, RegionOutOfBounds, UnknownClass

MERGE_MODES = ("hard_paste", "feather")


@dataclass(frozen=True)
class CropRegion:
    """Axis-aligned pixel rectangle, origin at the image top-left."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"region dims must be >= 1, got {self.w}x{self.h}")
        if self.x < 0 or self.y < 0:
            raise ValueError(f"region origin must be >= 0, got ({self.x}, {self.y})")

    def fits_in(self, width: int, height: int) -> bool:
        return self.x + self.w <= width and self.y + self.h <= height

    def contains(self, other: "CropRegion") -> bool:
        return (self.x <= other.x and self.y <= other.y
                and other.x + other.w <= self.x + self.w
                and other.y + other.h <= self.y + self.h)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_dict(cls, d: dict) -> "CropRegion":
        return cls(int(d["x"]), int(d["y"]), int(d["w"]), int(d["h"]))


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box covering [x, x+w) x [y, y+h); w, h > 0."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"bbox dims must be > 0, got {self.w}x{self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h

    def to_list(self) -> list:
        return [self.x, self.y, self.w, self.h]


class ClassPalette:
    """Ordered class list with dense ids from 0 and pairwise-distinct colors.

    Pure black is rejected: it is reserved for the mask surround.
    """

    def __init__(self, entries: list[tuple[str, tuple[int, int, int]]]):
        if not entries:
            raise ValueError("palette needs at least one class")
        self.names: list[str] = []
        self.colors: list[tuple[int, int, int]] = []
        seen = set()
        for name, color in entries:
            color = tuple(int(c) for c in color)
            if len(color) != 3 or any(c < 0 or c > 255 for c in color):
                raise ValueError(f"invalid color {color!r} for class {name!r}")
            if color == (0, 0, 0):
                raise ValueError(f"class {name!r} uses pure black, reserved for the surround")
            if color in seen:
                raise ValueError(f"duplicate color {color} for class {name!r}")
            seen.add(color)
            self.names.append(str(name))
            self.colors.append(color)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate class names in palette")

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, class_id: int) -> bool:
        return 0 <= class_id < len(self.names)

    def color_of(self, class_id: int) -> tuple[int, int, int]:
        if class_id not in self:
            raise UnknownClass(f"class id {class_id} not in palette (0..{len(self) - 1})")
        return self.colors[class_id]

    def name_of(self, class_id: int) -> str:
        if class_id not in self:
            raise UnknownClass(f"class id {class_id} not in palette (0..{len(self) - 1})")
        return self.names[class_id]

    def id_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownClass(f"class name {name!r} not in palette") from None

    def to_list(self) -> list[dict]:
        return [{"class_id": i, "name": n, "color": list(c)}
                for i, (n, c) in enumerate(zip(self.names, self.colors))]

    @classmethod
    def from_list(cls, items: list[dict]) -> "ClassPalette":
        ordered = sorted(items, key=lambda d: int(d["class_id"]))
        for expect, d in enumerate(ordered):
            if int(d["class_id"]) != expect:
                raise ValueError(f"palette ids must be dense from 0, got {d['class_id']}")
        return cls([(d["name"], tuple(d["color"])) for d in ordered])


def ensure_image(arr: np.ndarray) -> np.ndarray:
    if not isinstance(arr, np.ndarray) or arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (h, w, 3) array, got {getattr(arr, 'shape', type(arr))}")
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {arr.dtype}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image dims must be >= 1")
    return arr


def ensure_mask(mask: np.ndarray) -> np.ndarray:
    if not isinstance(mask, np.ndarray) or mask.ndim != 2:
        raise ValueError(f"expected (h, w) bool array, got {getattr(mask, 'shape', type(mask))}")
    if mask.dtype != np.bool_:
        raise ValueError(f"expected bool mask, got {mask.dtype}")
    return mask


def _check_bound(region: CropRegion, image: np.ndarray) -> None:
    h, w = image.shape[:2]
    if not region.fits_in(w, h):
        raise RegionOutOfBounds(
            f"region {region} exceeds image extents {w}x{h}")


def extract_crop(image: np.ndarray, region: CropRegion) -> np.ndarray:
    """Copy out the rectangle `region` of `image`."""
    ensure_image(image)
    _check_bound(region, image)
    return image[region.y:region.y + region.h, region.x:region.x + region.w].copy()


def merge_patch(image: np.ndarray, patch: np.ndarray, region: CropRegion,
                mode: str = "hard_paste", border_px: int = 0) -> np.ndarray:
    """Return a copy of `image` with `patch` pasted into `region`.

    hard_paste replaces the region verbatim; feather alpha-ramps a
    `border_px`-wide ring against the original pixels. Pixels outside the
    region are never touched.
    """
    ensure_image(image)
    ensure_image(patch)
    _check_bound(region, image)
    if patch.shape[:2] != (region.h, region.w):
        raise DimensionMismatch(
            f"patch is {patch.shape[1]}x{patch.shape[0]}, region wants {region.w}x{region.h}")
    if mode not in MERGE_MODES:
        raise ValueError(f"unknown merge mode {mode!r}")
    if mode == "feather" and border_px < 0:
        raise ValueError("border_px must be >= 0")
    out = image.copy()
    border = border_px if mode == "feather" else 0
    _kernels.feather_blend(out, np.ascontiguousarray(patch), region.x, region.y, border)
    return out


def mask_bbox(mask: np.ndarray) -> BBox:
    """Minimal enclosing box of the set bits."""
    ensure_mask(mask)
    rows = np.flatnonzero(mask.any(axis=1))
    if rows.size == 0:
        raise EmptyMask("mask has no set pixels")
    cols = np.flatnonzero(mask.any(axis=0))
    x0, x1 = int(cols[0]), int(cols[-1])
    y0, y1 = int(rows[0]), int(rows[-1])
    return BBox(x0, y0, x1 - x0 + 1, y1 - y0 + 1)


def scale_mask(mask: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Nearest-neighbor resample; source index = floor((2i+1) * src / (2*target))."""
    ensure_mask(mask)
    if not mask.any():
        raise EmptyMask("cannot scale an empty mask")
    if target_w < 1 or target_h < 1:
        raise ValueError("target dims must be >= 1")
    sh, sw = mask.shape
    if (sw, sh) == (target_w, target_h):
        return mask.copy()
    ys = ((2 * np.arange(target_h, dtype=np.int64) + 1) * sh) // (2 * target_h)
    xs = ((2 * np.arange(target_w, dtype=np.int64) + 1) * sw) // (2 * target_w)
    return mask[ys[:, None], xs[None, :]]


def load_image(path: str | Path) -> np.ndarray:
    """Load PNG or JPEG as RGB8, flattening any alpha against black."""
    with Image.open(path) as im:
        if im.mode != "RGB":
            if "A" in im.getbands():
                base = Image.new("RGBA", im.size, (0, 0, 0, 255))
                base.alpha_composite(im.convert("RGBA"))
                im = base.convert("RGB")
            else:
                im = im.convert("RGB")
        return np.asarray(im, dtype=np.uint8).copy()


def save_png(path: str | Path, image: np.ndarray, compress_level: int = 1) -> None:
    """Write a lossless PNG. compress_level is fixed per run so bytes stay stable."""
    ensure_image(image)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(image, mode="RGB").save(path, format="PNG", compress_level=compress_level)


def encode_png(image: np.ndarray, compress_level: int = 1) -> bytes:
    import io

    ensure_image(image)
    buf = io.BytesIO()
    Image.fromarray(image, mode="RGB").save(buf, format="PNG", compress_level=compress_level)
    return buf.getvalue()


def decode_png(data: bytes) -> np.ndarray:
    import io

    with Image.open(io.BytesIO(data)) as im:
        if im.mode != "RGB":
            im = im.convert("RGB")
        return np.asarray(im, dtype=np.uint8).copy()


def load_mask(path: str | Path) -> np.ndarray:
    """Load a single-channel mask PNG; value >= 128 means set."""
    with Image.open(path) as im:
        if im.mode != "L":
            im = im.convert("L")
        return np.asarray(im, dtype=np.uint8) >= 128


def save_mask(path: str | Path, mask: np.ndarray) -> None:
    ensure_mask(mask)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L").save(path, format="PNG")


def image_dims(path: str | Path) -> tuple[int, int]:
    """(width, height) from the file header, without decoding pixel data."""
    with Image.open(path) as im:
        return im.size
