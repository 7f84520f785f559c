"""Pure-NumPy kernel implementations.

This module is the behavioral reference: the compiled extension in
``_core.pyx`` must match it bit-for-bit. All arithmetic that could round is
therefore spelled out in integers:

* blends round half-up via ``(num + den // 2) // den``
* two-way averages round half-up via ``(a + b + 1) // 2``
* per-pixel noise is ``hash64(seed, y * width + x)`` reduced mod 97 to a
  luminance delta in [-48, 48] with 0 remapped to 1
"""

from __future__ import annotations

import numpy as np

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def compose_zones(patch: np.ndarray, mask: np.ndarray, rx: int, ry: int,
                  color: tuple[int, int, int]) -> None:
    """Overwrite the mask rectangle in-place: class color on set bits, black off."""
    rh, rw = mask.shape
    rect = patch[ry:ry + rh, rx:rx + rw]
    rect[:] = 0
    rect[mask] = np.asarray(color, dtype=np.uint8)


def procedural_fill(patch: np.ndarray, mask: np.ndarray, rx: int, ry: int,
                    color: tuple[int, int, int], seed: int) -> None:
    """Replace the conditioning rectangle with a plausible fill, in-place.

    Mask pixels get a seeded luminance-noise texture over the class color;
    the black surround is filled by integer lerp between the nearest patch
    pixels outside the rectangle on the same row and column.
    """
    ph, pw = patch.shape[:2]
    rh, rw = mask.shape

    # -- surround: separable linear interpolation from the rect border
    xl, xr = rx - 1, rx + rw            # columns just outside the rect
    yt, yb = ry - 1, ry + rh            # rows just outside the rect
    work = np.zeros((rh, rw, 3), dtype=np.int64)
    nsrc = 0

    if xl >= 0 or xr < pw:
        if xl >= 0 and xr < pw:
            left = patch[ry:ry + rh, xl].astype(np.int64)[:, None, :]
            right = patch[ry:ry + rh, xr].astype(np.int64)[:, None, :]
            x = np.arange(rx, rx + rw, dtype=np.int64)[None, :, None]
            den = xr - xl
            hv = (left * (xr - x) + right * (x - xl) + den // 2) // den
        elif xl >= 0:
            hv = np.broadcast_to(patch[ry:ry + rh, xl].astype(np.int64)[:, None, :], (rh, rw, 3))
        else:
            hv = np.broadcast_to(patch[ry:ry + rh, xr].astype(np.int64)[:, None, :], (rh, rw, 3))
        work = work + hv
        nsrc += 1
    if yt >= 0 or yb < ph:
        if yt >= 0 and yb < ph:
            top = patch[yt, rx:rx + rw].astype(np.int64)[None, :, :]
            bottom = patch[yb, rx:rx + rw].astype(np.int64)[None, :, :]
            y = np.arange(ry, ry + rh, dtype=np.int64)[:, None, None]
            den = yb - yt
            vv = (top * (yb - y) + bottom * (y - yt) + den // 2) // den
        elif yt >= 0:
            vv = np.broadcast_to(patch[yt, rx:rx + rw].astype(np.int64)[None, :, :], (rh, rw, 3))
        else:
            vv = np.broadcast_to(patch[yb, rx:rx + rw].astype(np.int64)[None, :, :], (rh, rw, 3))
        if nsrc:
            work = (work + vv + 1) // 2
        else:
            work = work + vv
        nsrc += 1
    fill = work.astype(np.uint8)

    # -- mask texture: class color plus per-pixel luminance noise
    ys, xs = np.nonzero(mask)
    idx = ((ys + ry).astype(np.uint64) * np.uint64(pw) + (xs + rx).astype(np.uint64))
    z = _mix64((np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (idx + np.uint64(1)) * _GOLDEN) & _MASK64)
    delta = (z % np.uint64(97)).astype(np.int64) - 48
    delta[delta == 0] = 1
    base = np.asarray(color, dtype=np.int64)
    tex = np.clip(base[None, :] + delta[:, None], 0, 255)
    collided = np.all(tex == base[None, :], axis=1)
    if collided.any():
        tex[collided] = np.clip(base[None, :] - delta[collided, None], 0, 255)
    dom = 0 if color[0] >= color[1] and color[0] >= color[2] else (1 if color[1] >= color[2] else 2)
    tex[:, dom] = np.maximum(tex[:, dom], 1)

    rect = patch[ry:ry + rh, rx:rx + rw]
    rect[:] = np.where(mask[:, :, None], rect, fill)
    rect[mask] = tex.astype(np.uint8)


def feather_blend(dst: np.ndarray, patch: np.ndarray, x0: int, y0: int,
                  border: int) -> None:
    """Paste `patch` into `dst` at (x0, y0), alpha-ramping a `border`-wide ring.

    Depth d is the in-patch distance to the nearest patch edge; pixels with
    d >= border are pure patch, shallower ones blend with weight
    (d + 1) / (border + 1).
    """
    rh, rw = patch.shape[:2]
    region = dst[y0:y0 + rh, x0:x0 + rw]
    if border <= 0:
        region[:] = patch
        return
    ii = np.arange(rw, dtype=np.int64)
    jj = np.arange(rh, dtype=np.int64)
    depth = np.minimum(
        np.minimum(ii, rw - 1 - ii)[None, :],
        np.minimum(jj, rh - 1 - jj)[:, None],
    )
    den = border + 1
    alpha = np.minimum(depth + 1, den)[:, :, None]
    blended = (patch.astype(np.int64) * alpha
               + region.astype(np.int64) * (den - alpha) + den // 2) // den
    region[:] = np.where(depth[:, :, None] >= border, patch, blended.astype(np.uint8))
