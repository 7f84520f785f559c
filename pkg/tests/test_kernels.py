"""The two kernel lanes are one behavior: every function must agree bit-for-bit."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornerforge import _kernels
from cornerforge._kernels import implementations
from cornerforge.rng import SplitMix64, hash64

LANES = implementations()
HAS_COMPILED = "compiled" in LANES


def _random_case(seed: int, max_side: int = 64):
    r = SplitMix64(seed)
    ph = r.next_int(8, max_side)
    pw = r.next_int(8, max_side)
    mh = r.next_int(1, ph - 1) if ph > 1 else 1
    mw = r.next_int(1, pw - 1) if pw > 1 else 1
    ry = r.next_below(ph - mh + 1)
    rx = r.next_below(pw - mw + 1)
    patch = np.frombuffer(
        np.array([hash64(seed, i) & 0xFF for i in range(ph * pw * 3)],
                 dtype=np.uint8).tobytes(), dtype=np.uint8).reshape(ph, pw, 3).copy()
    mask = np.zeros((mh, mw), dtype=bool)
    for i in range(mh * mw):
        if hash64(seed ^ 0xABCD, i) & 1:
            mask.flat[i] = True
    color = (r.next_int(1, 255), r.next_below(256), r.next_below(256))
    return patch, mask, rx, ry, color


@pytest.mark.skipif(not HAS_COMPILED, reason="compiled lane unavailable")
@pytest.mark.parametrize("seed", range(40))
def test_compose_zones_lanes_identical(seed):
    patch, mask, rx, ry, color = _random_case(seed)
    out = {}
    for lane, mod in LANES.items():
        p = patch.copy()
        mod.compose_zones(p, mask, rx, ry, color)
        out[lane] = p
    assert np.array_equal(out["python"], out["compiled"])


@pytest.mark.skipif(not HAS_COMPILED, reason="compiled lane unavailable")
@pytest.mark.parametrize("seed", range(40))
def test_procedural_fill_lanes_identical(seed):
    patch, mask, rx, ry, color = _random_case(seed)
    fill_seed = hash64(seed, 77)
    out = {}
    for lane, mod in LANES.items():
        p = patch.copy()
        mod.compose_zones(p, mask, rx, ry, color)
        mod.procedural_fill(p, mask, rx, ry, color, fill_seed)
        out[lane] = p
    assert np.array_equal(out["python"], out["compiled"])


@pytest.mark.skipif(not HAS_COMPILED, reason="compiled lane unavailable")
@pytest.mark.parametrize("seed", range(40))
def test_feather_blend_lanes_identical(seed):
    r = SplitMix64(seed + 5000)
    H, W = r.next_int(16, 80), r.next_int(16, 80)
    ph, pw = r.next_int(4, H), r.next_int(4, W)
    y0, x0 = r.next_below(H - ph + 1), r.next_below(W - pw + 1)
    border = r.next_below(6)
    dst = np.arange(H * W * 3, dtype=np.int64).astype(np.uint8).reshape(H, W, 3)
    patch = (np.arange(ph * pw * 3, dtype=np.int64) * 7 + 3).astype(np.uint8).reshape(ph, pw, 3)
    out = {}
    for lane, mod in LANES.items():
        d = dst.copy()
        mod.feather_blend(d, patch, x0, y0, border)
        out[lane] = d
    assert np.array_equal(out["python"], out["compiled"])


# --- behavioral checks against the documented formulas (python lane) -------

pyref = LANES["python"]


def test_compose_zones_paints_exact_zones():
    patch = np.full((10, 12, 3), 200, np.uint8)
    ref = patch.copy()
    mask = np.zeros((4, 5), dtype=bool)
    mask[1:3, 1:4] = True
    pyref.compose_zones(patch, mask, 3, 2, (10, 20, 30))
    for y in range(10):
        for x in range(12):
            in_rect = 2 <= y < 6 and 3 <= x < 8
            if not in_rect:
                assert tuple(patch[y, x]) == tuple(ref[y, x])
            elif mask[y - 2, x - 3]:
                assert tuple(patch[y, x]) == (10, 20, 30)
            else:
                assert tuple(patch[y, x]) == (0, 0, 0)


def test_procedural_fill_touches_only_rect():
    patch, mask, rx, ry, color = _random_case(31)
    pyref.compose_zones(patch, mask, rx, ry, color)
    before = patch.copy()
    pyref.procedural_fill(patch, mask, rx, ry, color, 987654321)
    mh, mw = mask.shape
    outside = np.ones(patch.shape[:2], dtype=bool)
    outside[ry:ry + mh, rx:rx + mw] = False
    assert np.array_equal(patch[outside], before[outside])


def test_procedural_fill_mask_noise_formula():
    # Every mask pixel must equal color + delta, delta = hash(seed, global
    # pixel index) % 97 - 48 with 0 remapped to 1, clamped to [0, 255]; a
    # full-channel collision with the flat color flips the delta sign, and
    # the dominant channel is lifted to at least 1.
    patch = np.zeros((9, 11, 3), np.uint8)
    mask = np.ones((5, 7), dtype=bool)
    rx, ry = 2, 3
    color = (200, 30, 0)
    seed = 1234
    pw = patch.shape[1]
    pyref.compose_zones(patch, mask, rx, ry, color)
    pyref.procedural_fill(patch, mask, rx, ry, color, seed)
    mh, mw = mask.shape
    clip = lambda v: min(255, max(0, v))  # noqa: E731
    for y in range(mh):
        for x in range(mw):
            delta = hash64(seed, (ry + y) * pw + (rx + x)) % 97 - 48
            if delta == 0:
                delta = 1
            want = [clip(c + delta) for c in color]
            if want == list(color):
                want = [clip(c - delta) for c in color]
            want[0] = max(want[0], 1)  # dominant channel of (200, 30, 0)
            px = list(patch[ry + y, rx + x].astype(int))
            assert px == want, (y, x, delta, px, want)


def test_procedural_fill_is_deterministic():
    patch, mask, rx, ry, color = _random_case(8)
    a, b = patch.copy(), patch.copy()
    for p in (a, b):
        pyref.compose_zones(p, mask, rx, ry, color)
        pyref.procedural_fill(p, mask, rx, ry, color, 42)
    assert np.array_equal(a, b)


def test_feather_blend_zero_border_is_hard_paste():
    dst = np.zeros((8, 8, 3), np.uint8)
    patch = np.full((4, 4, 3), 250, np.uint8)
    pyref.feather_blend(dst, patch, 2, 2, 0)
    assert np.array_equal(dst[2:6, 2:6], patch)
    assert dst.sum() == patch.sum()


def test_feather_blend_alpha_rule():
    # alpha = (depth + 1) / (border + 1), blended as integer rounding:
    # out = (patch*(d+1) + dst*(border-d) + (border+1)//2) // (border+1)
    border = 3
    dst = np.full((12, 12, 3), 40, np.uint8)
    patch = np.full((8, 8, 3), 200, np.uint8)
    ref = dst.copy()
    pyref.feather_blend(dst, patch, 2, 2, border)
    for y in range(8):
        for x in range(8):
            depth = min(y, x, 7 - y, 7 - x)
            if depth >= border:
                want = 200
            else:
                num = 200 * (depth + 1) + 40 * (border - depth)
                want = (num + (border + 1) // 2) // (border + 1)
            assert dst[2 + y, 2 + x, 0] == want, (y, x, depth)
    outside = np.ones((12, 12), dtype=bool)
    outside[2:10, 2:10] = False
    assert np.array_equal(dst[outside], ref[outside])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
@pytest.mark.skipif(not HAS_COMPILED, reason="compiled lane unavailable")
def test_lanes_identical_property(seed):
    patch, mask, rx, ry, color = _random_case(seed, max_side=40)
    outs = []
    for mod in LANES.values():
        p = patch.copy()
        mod.compose_zones(p, mask, rx, ry, color)
        mod.procedural_fill(p, mask, rx, ry, color, hash64(seed, 3))
        q = np.full((p.shape[0] + 10, p.shape[1] + 10, 3), 9, np.uint8)
        mod.feather_blend(q, p, 5, 5, 2)
        outs.append(q)
    assert np.array_equal(outs[0], outs[1])


def test_forced_lane_env(monkeypatch):
    import importlib

    import cornerforge._kernels as k
    monkeypatch.setenv("CORNERFORGE_KERNELS", "python")
    mod = importlib.reload(k)
    assert mod.BACKEND == "python"
    monkeypatch.delenv("CORNERFORGE_KERNELS")
    importlib.reload(k)
    assert k.BACKEND in ("python", "compiled")
