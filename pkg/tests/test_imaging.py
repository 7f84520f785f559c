import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornerforge.errors import (
    DimensionMismatch,
    EmptyMask,
    RegionOutOfBounds,
)
from cornerforge.imaging import (
    BBox,
    ClassPalette,
    CropRegion,
    decode_png,
    encode_png,
    extract_crop,
    image_dims,
    load_image,
    load_mask,
    mask_bbox,
    merge_patch,
    save_mask,
    save_png,
    scale_mask,
)

# ---------------------------------------------------------------------------
# geometry types


def test_crop_region_validation():
    CropRegion(0, 0, 1, 1)
    with pytest.raises(ValueError):
        CropRegion(-1, 0, 5, 5)
    with pytest.raises(ValueError):
        CropRegion(0, 0, 0, 5)


def test_crop_region_fits_and_contains():
    r = CropRegion(2, 3, 10, 5)
    assert r.fits_in(12, 8)
    assert not r.fits_in(11, 8)
    assert r.contains(CropRegion(2, 3, 10, 5))
    assert r.contains(CropRegion(4, 4, 2, 2))
    assert not r.contains(CropRegion(4, 4, 20, 2))


def test_bbox_validation_and_area():
    b = BBox(1.5, 2.0, 3.0, 4.0)
    assert b.area == 12.0
    assert b.to_list() == [1.5, 2.0, 3.0, 4.0]
    with pytest.raises(ValueError):
        BBox(0, 0, 0.0, 1.0)
    with pytest.raises(ValueError):
        BBox(0, 0, 1.0, -2.0)


def test_palette_basics():
    p = ClassPalette([("a", (255, 0, 0)), ("b", (0, 255, 0))])
    assert p.names == ["a", "b"]
    assert p.id_of("b") == 1
    assert p.color_of(0) == (255, 0, 0)
    assert p.name_of(1) == "b"


def test_palette_rejects_black_duplicates_and_empty():
    with pytest.raises(ValueError):
        ClassPalette([("a", (0, 0, 0))])
    with pytest.raises(ValueError):
        ClassPalette([("a", (1, 2, 3)), ("b", (1, 2, 3))])
    with pytest.raises(ValueError):
        ClassPalette([("a", (1, 2, 3)), ("a", (4, 5, 6))])
    with pytest.raises(ValueError):
        ClassPalette([])


def test_palette_list_round_trip():
    p = ClassPalette([("a", (255, 0, 0)), ("b", (0, 255, 0))])
    q = ClassPalette.from_list(p.to_list())
    assert q.names == p.names and q.colors == p.colors


# ---------------------------------------------------------------------------
# crop/merge


def _index_image(h=4, w=4):
    # pixel (r, c) has red = 16 * (r * w + c); green/blue echo position
    img = np.zeros((h, w, 3), np.uint8)
    for r in range(h):
        for c in range(w):
            img[r, c] = (16 * (r * w + c) % 256, r, c)
    return img


def test_extract_crop_known_case():
    img = _index_image(4, 4)
    crop = extract_crop(img, CropRegion(1, 1, 2, 2))
    assert crop[..., 0].tolist() == [[80, 96], [144, 160]]


def test_extract_crop_is_a_copy():
    img = _index_image()
    crop = extract_crop(img, CropRegion(0, 0, 2, 2))
    crop[:] = 0
    assert img[0, 0, 0] == 0 and img[0, 1, 0] == 16  # untouched


def test_extract_crop_out_of_bounds():
    img = _index_image(4, 4)
    with pytest.raises(RegionOutOfBounds):
        extract_crop(img, CropRegion(2, 2, 3, 3))


def test_merge_patch_dimension_mismatch():
    img = _index_image(8, 8)
    with pytest.raises(DimensionMismatch):
        merge_patch(img, np.zeros((3, 3, 3), np.uint8), CropRegion(0, 0, 2, 2))


dims = st.integers(min_value=1, max_value=40)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_crop_merge_round_trip(data):
    h = data.draw(st.integers(4, 48), label="h")
    w = data.draw(st.integers(4, 48), label="w")
    ch = data.draw(st.integers(1, h), label="ch")
    cw = data.draw(st.integers(1, w), label="cw")
    x = data.draw(st.integers(0, w - cw), label="x")
    y = data.draw(st.integers(0, h - ch), label="y")
    seed = data.draw(st.integers(0, 2**32), label="seed")
    rng = np.random.default_rng(seed)
    img = rng.integers(0, 256, (h, w, 3), dtype=np.uint8)
    patch = rng.integers(0, 256, (ch, cw, 3), dtype=np.uint8)
    region = CropRegion(x, y, cw, ch)
    merged = merge_patch(img, patch, region)
    # pasted region reads back exactly; everything else untouched
    assert np.array_equal(extract_crop(merged, region), patch)
    outside = np.ones((h, w), dtype=bool)
    outside[y:y + ch, x:x + cw] = False
    assert np.array_equal(merged[outside], img[outside])
    # original input is never modified
    assert np.array_equal(extract_crop(img, region),
                          img[y:y + ch, x:x + cw])


def test_merge_patch_feather_blends_edges():
    img = np.zeros((10, 10, 3), np.uint8)
    patch = np.full((6, 6, 3), 255, np.uint8)
    region = CropRegion(2, 2, 6, 6)
    out = merge_patch(img, patch, region, mode="feather", border_px=2)
    assert out[4:6, 4:6].min() == 255          # deep interior is pure patch
    assert 0 < out[2, 2, 0] < 255              # corner is blended
    hard = merge_patch(img, patch, region)
    assert not np.array_equal(out, hard)


# ---------------------------------------------------------------------------
# masks


def test_mask_bbox_known_case():
    mask = np.zeros((16, 16), dtype=bool)
    mask[4, 3] = True
    mask[8, 10] = True
    assert mask_bbox(mask).to_list() == [3.0, 4.0, 8.0, 5.0]


def test_mask_bbox_empty():
    with pytest.raises(EmptyMask):
        mask_bbox(np.zeros((4, 4), dtype=bool))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(1, 30), st.integers(0, 2**32))
def test_mask_bbox_minimality(h, w, seed):
    rng = np.random.default_rng(seed)
    mask = rng.random((h, w)) < 0.2
    if not mask.any():
        mask[rng.integers(h), rng.integers(w)] = True
    b = mask_bbox(mask)
    x0, y0, bw, bh = int(b.x), int(b.y), int(b.w), int(b.h)
    inside = np.zeros_like(mask)
    inside[y0:y0 + bh, x0:x0 + bw] = True
    assert not (mask & ~inside).any()          # box covers all set bits
    assert mask[y0, :].any() and mask[y0 + bh - 1, :].any()   # rows touch
    assert mask[:, x0].any() and mask[:, x0 + bw - 1].any()   # cols touch


def test_scale_mask_known_case():
    # top row set, doubled: source row index ((2i+1)*2)//8 = 0,0,1,1
    mask = np.zeros((2, 2), dtype=bool)
    mask[0, :] = True
    out = scale_mask(mask, 4, 4)
    assert out.shape == (4, 4)
    assert out[:2].all() and not out[2:].any()


def test_scale_mask_identity_is_copy():
    mask = np.eye(5, dtype=bool)
    out = scale_mask(mask, 5, 5)
    assert np.array_equal(out, mask)
    out[0, 1] = True
    assert not mask[0, 1]


def test_scale_mask_rejects_empty():
    with pytest.raises(EmptyMask):
        scale_mask(np.zeros((3, 3), dtype=bool), 2, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 24), st.integers(1, 24), st.integers(1, 40),
       st.integers(1, 40), st.integers(0, 2**32))
def test_scale_mask_properties(h, w, th, tw, seed):
    rng = np.random.default_rng(seed)
    mask = rng.random((h, w)) < 0.5
    mask[rng.integers(h), rng.integers(w)] = True
    out = scale_mask(mask, tw, th)
    assert out.shape == (th, tw)
    assert out.dtype == bool
    # every output pixel equals its nearest-neighbor source pixel
    ys = ((2 * np.arange(th) + 1) * h) // (2 * th)
    xs = ((2 * np.arange(tw) + 1) * w) // (2 * tw)
    assert np.array_equal(out, mask[ys[:, None], xs[None, :]])


# ---------------------------------------------------------------------------
# codecs


def test_png_round_trip(nprng, tmp_path):
    img = nprng.integers(0, 256, (21, 17, 3), dtype=np.uint8)
    p = tmp_path / "x.png"
    save_png(p, img)
    assert np.array_equal(load_image(p), img)
    assert image_dims(p) == (17, 21)


def test_encode_decode_round_trip(nprng):
    img = nprng.integers(0, 256, (9, 13, 3), dtype=np.uint8)
    assert np.array_equal(decode_png(encode_png(img)), img)


def test_save_png_bytes_are_deterministic(nprng, tmp_path):
    img = nprng.integers(0, 256, (32, 32, 3), dtype=np.uint8)
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    save_png(a, img)
    save_png(b, img)
    assert a.read_bytes() == b.read_bytes()


def test_mask_round_trip(tmp_path):
    mask = np.zeros((12, 7), dtype=bool)
    mask[3:7, 2:5] = True
    p = tmp_path / "m.png"
    save_mask(p, mask)
    assert np.array_equal(load_mask(p), mask)


def test_load_image_flattens_alpha(tmp_path):
    from PIL import Image

    rgba = np.zeros((4, 4, 4), np.uint8)
    rgba[..., 0] = 200   # red
    rgba[..., 3] = 128   # half transparent -> flattened against black
    p = tmp_path / "a.png"
    Image.fromarray(rgba, "RGBA").save(p)
    img = load_image(p)
    assert img.shape == (4, 4, 3)
    assert int(img[0, 0, 0]) in (100, 101)  # 200 * 128/255, codec rounding
    assert img[0, 0, 1] == 0
