"""Fixture builders shared by the test modules."""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from cornerforge.imaging import save_mask, save_png
from cornerforge.rng import SplitMix64


def make_background(seed: int, width: int = 320, height: int = 260) -> np.ndarray:
    """Sky-like gradient with a deterministic tint and some banding."""
    r = SplitMix64(seed)
    base = np.linspace(90.0, 210.0, height)[:, None]
    img = np.zeros((height, width, 3), np.uint8)
    img[..., 0] = np.clip(base * 0.6 + r.next_below(40), 0, 255).astype(np.uint8)
    img[..., 1] = np.clip(base * 0.8 + r.next_below(30), 0, 255).astype(np.uint8)
    img[..., 2] = np.clip(base * 1.1 + r.next_below(25), 0, 255).astype(np.uint8)
    stripe = 20 + r.next_below(30)
    img[::stripe, :, 1] = np.minimum(255, img[::stripe, :, 1].astype(int) + 12).astype(np.uint8)
    return img


def write_backgrounds(bg_dir: Path, count: int, width: int = 320,
                      height: int = 260, seed0: int = 500) -> list[Path]:
    bg_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(count):
        p = bg_dir / f"sky_{i:03d}.png"
        save_png(p, make_background(seed0 + i, width, height))
        paths.append(p)
    return paths


def blob_mask(seed: int, height: int = 48, width: int = 72) -> np.ndarray:
    """Non-empty elliptical blob with a deterministic offset and skew."""
    r = SplitMix64(seed)
    yy, xx = np.mgrid[0:height, 0:width]
    cy = height / 2 + r.next_int(-height // 6, height // 6)
    cx = width / 2 + r.next_int(-width // 6, width // 6)
    a = width * 0.30 + r.next_below(width // 6)
    b = height * 0.28 + r.next_below(height // 6)
    mask = ((xx - cx) ** 2 / a ** 2 + (yy - cy) ** 2 / b ** 2) <= 1.0
    if not mask.any():
        mask[height // 2, width // 2] = True
    return mask


def write_pool(pool_dir: Path, class_counts: dict[str, int],
               mask_size: tuple[int, int] = (48, 72), seed0: int = 9000) -> int:
    """Lay out <pool_dir>/<class name>/obj_xxx.png mask files; returns total."""
    h, w = mask_size
    k = 0
    for cname, count in class_counts.items():
        d = pool_dir / cname
        d.mkdir(parents=True, exist_ok=True)
        for j in range(count):
            save_mask(d / f"obj_{j:03d}.png", blob_mask(seed0 + k, h, w))
            k += 1
    return k


def config_text(master_seed: int = 42, splits: dict[str, int] | None = None,
                crop_size: int = 96, attested: bool = True,
                palette_lines: str | None = None,
                quota_lines: str | None = None,
                extra: str = "") -> str:
    """TOML run config pointing at bg/, pool/train/, pool/heldout/ siblings."""
    splits = splits or {"train": 12, "test": 4, "val": 4}
    split_text = "\n".join(f"{name} = {size}" for name, size in splits.items())
    text = f"""
schema_version = 1
master_seed = {master_seed}
output_dir = "out"
background_dir = "bg"
background_attestation = {str(attested).lower()}

[placement]
crop_size = {crop_size}
mask_scale_range = [0.15, 0.5]

[pools]
train = "pool/train"
heldout = "pool/heldout"

[splits]
{split_text}
"""
    if palette_lines:
        text += f"\n[palette]\n{palette_lines}\n"
    if quota_lines:
        text += f"\n[class_quotas]\n{quota_lines}\n"
    return text + extra


def build_workspace(root: Path, classes: dict[str, tuple[int, int]],
                    n_backgrounds: int = 6, bg_size: tuple[int, int] = (320, 260),
                    mask_size: tuple[int, int] = (48, 72)) -> Path:
    """Backgrounds plus train/heldout pools; classes maps name ->
    (train count, heldout count). Returns the root."""
    width, height = bg_size
    write_backgrounds(root / "bg", n_backgrounds, width, height)
    write_pool(root / "pool" / "train",
               {c: n for c, (n, _) in classes.items()}, mask_size, seed0=9000)
    write_pool(root / "pool" / "heldout",
               {c: n for c, (_, n) in classes.items()}, mask_size, seed0=40000)
    return root


def tree_hash(root: Path) -> str:
    """Order-independent content hash of every file under root."""
    h = hashlib.sha256()
    for f in sorted(p for p in root.rglob("*") if p.is_file()):
        h.update(str(f.relative_to(root)).encode())
        h.update(b"\0")
        h.update(f.read_bytes())
        h.update(b"\1")
    return h.hexdigest()
