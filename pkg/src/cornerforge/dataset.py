"""Dataset runs: plan first, execute second.

Planning derives every random decision (backgrounds, objects, placements)
from the master seed and writes a canonical-JSON manifest; the manifest is
the dataset's provenance record. Execution replays the manifest against a
backend and is bit-deterministic for deterministic backends regardless of
worker count, because item seeds are fixed at plan time.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .backends import BackendDescriptor, GenerationRequest, derive_ground_truth, generate
from .conditioning import build_prompt, compose_condition_patch
from .errors import (
    CornerforgeError,
    EmptyMask,
    EmptyPool,
    InsufficientBackgrounds,
    MissingImage,
    RegionOutOfBounds,
)
from .imaging import (
    BBox,
    ClassPalette,
    CropRegion,
    extract_crop,
    image_dims,
    load_image,
    load_mask,
    merge_patch,
    save_png,
    scale_mask,
)
from .placement import Placement, PlacementConfig, sample_placement
from .rng import RNG_ALGORITHM, SplitMix64, hash64

MANIFEST_SCHEMA_VERSION = 1
POOL_IDS = ("train_pool", "heldout_pool")
IMAGE_EXTS = (".png", ".jpg", ".jpeg")

# salts for deriving independent sub-streams from the master seed
_BG_SHUFFLE_SALT = 0xB6
_QUOTA_SHUFFLE_SALT = 0xC1A55
_ITEM_BG_SALT = 1
_ITEM_OBJ_SALT = 2
_ITEM_PLACE_SALT = 3


@dataclass(frozen=True)
class PoolEntry:
    object_id: str
    class_id: int
    mask_path: str


class ObjectPool:
    """Mask assets an object can be drawn from, keyed train vs heldout."""

    def __init__(self, pool_id: str, entries: list[PoolEntry]):
        if pool_id not in POOL_IDS:
            raise ValueError(f"pool_id must be one of {POOL_IDS}")
        ids = [e.object_id for e in entries]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate object ids in {pool_id}")
        self.pool_id = pool_id
        self.entries = sorted(entries, key=lambda e: e.object_id)
        self._by_class: dict[int, list[PoolEntry]] = {}
        for e in self.entries:
            self._by_class.setdefault(e.class_id, []).append(e)

    def __len__(self) -> int:
        return len(self.entries)

    def of_class(self, class_id: int) -> list[PoolEntry]:
        return self._by_class.get(class_id, [])

    def validate_assets(self) -> None:
        """Load every mask once; empty masks are a data error."""
        for e in self.entries:
            if not load_mask(e.mask_path).any():
                raise EmptyMask(f"pool asset {e.object_id} ({e.mask_path}) is empty")

    @classmethod
    def scan(cls, pool_dir: str | Path, pool_id: str, palette: ClassPalette) -> "ObjectPool":
        """Build a pool from <pool_dir>/<class_name>/<object>.png mask files.

        Object ids are pool-qualified (<pool_id>/<class>/<stem>) so the same
        file stem in the train and heldout trees never aliases: the two pools
        are disjoint object sets and their records must stay distinguishable
        in a manifest.
        """
        pool_dir = Path(pool_dir)
        entries = []
        for class_dir in sorted(p for p in pool_dir.iterdir() if p.is_dir()):
            class_id = palette.id_of(class_dir.name)
            for f in sorted(class_dir.glob("*.png")):
                entries.append(PoolEntry(
                    object_id=f"{pool_id}/{class_dir.name}/{f.stem}",
                    class_id=class_id,
                    mask_path=str(f),
                ))
        if not entries:
            raise EmptyPool(f"no mask assets under {pool_dir}")
        return cls(pool_id, entries)


@dataclass(frozen=True)
class BackgroundInfo:
    background_id: str
    path: str
    width: int
    height: int


def scan_backgrounds(background_dir: str | Path, min_side: int) -> list[BackgroundInfo]:
    """Catalog usable backgrounds; images shorter than `min_side` are rejected.

    Suitability beyond size (clear sky in the top half, no preexisting
    aircraft) stays the operator's responsibility and is attested in the run
    config, not checked here.
    """
    background_dir = Path(background_dir)
    found = []
    for f in sorted(background_dir.rglob("*")):
        if f.suffix.lower() not in IMAGE_EXTS or not f.is_file():
            continue
        w, h = image_dims(f)
        if min(w, h) < min_side:
            continue
        found.append(BackgroundInfo(
            background_id=str(f.relative_to(background_dir).with_suffix("")).replace("\\", "/"),
            path=str(f), width=w, height=h))
    return found


@dataclass(frozen=True)
class ManifestItem:
    item_id: str
    split: str
    background_id: str
    placement: Placement
    prompt: str

    def to_dict(self) -> dict:
        return {"item_id": self.item_id, "split": self.split,
                "background_id": self.background_id,
                "placement": self.placement.to_dict(), "prompt": self.prompt}

    @classmethod
    def from_dict(cls, d: dict) -> "ManifestItem":
        return cls(item_id=d["item_id"], split=d["split"],
                   background_id=d["background_id"],
                   placement=Placement.from_dict(d["placement"]),
                   prompt=d["prompt"])


@dataclass
class GenerationManifest:
    master_seed: int
    rng_algorithm: str
    palette: ClassPalette
    backend: BackendDescriptor
    placement_cfg: PlacementConfig
    merge_mode: str
    merge_border_px: int
    splits: dict[str, list[str]]            # split name -> background ids
    items: list[ManifestItem]
    backgrounds: dict[str, BackgroundInfo]  # id -> info
    objects: dict[str, dict]                # object_id -> {class_id, mask_path, pool}
    background_attestation: bool = False

    def to_json(self) -> str:
        """Canonical serialization: sorted keys, 2-space indent, LF, trailing newline."""
        doc = {
            "schema_version": MANIFEST_SCHEMA_VERSION,
            "rng_algorithm": self.rng_algorithm,
            "master_seed": self.master_seed,
            "background_attestation": self.background_attestation,
            "palette": self.palette.to_list(),
            "backend": self.backend.to_dict(),
            "placement": {
                "vertical_fraction": self.placement_cfg.vertical_fraction,
                "crop_size": self.placement_cfg.crop_size,
                "mask_scale_range": list(self.placement_cfg.mask_scale_range),
                "edge_margin": self.placement_cfg.edge_margin,
            },
            "merge": {"mode": self.merge_mode, "border_px": self.merge_border_px},
            "splits": {name: list(ids) for name, ids in self.splits.items()},
            "items": [it.to_dict() for it in self.items],
            "backgrounds": {k: {"path": v.path, "width": v.width, "height": v.height}
                            for k, v in self.backgrounds.items()},
            "objects": self.objects,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GenerationManifest":
        doc = json.loads(text)
        if doc.get("schema_version") != MANIFEST_SCHEMA_VERSION:
            raise ValueError(f"unsupported manifest schema {doc.get('schema_version')}")
        pc = doc["placement"]
        return cls(
            master_seed=int(doc["master_seed"]),
            rng_algorithm=doc["rng_algorithm"],
            palette=ClassPalette.from_list(doc["palette"]),
            backend=BackendDescriptor.from_dict(doc["backend"]),
            placement_cfg=PlacementConfig(
                vertical_fraction=pc["vertical_fraction"],
                crop_size=pc["crop_size"],
                mask_scale_range=tuple(pc["mask_scale_range"]),
                edge_margin=pc["edge_margin"]),
            merge_mode=doc["merge"]["mode"],
            merge_border_px=int(doc["merge"]["border_px"]),
            splits={k: list(v) for k, v in doc["splits"].items()},
            items=[ManifestItem.from_dict(d) for d in doc["items"]],
            backgrounds={k: BackgroundInfo(k, v["path"], int(v["width"]), int(v["height"]))
                         for k, v in doc["backgrounds"].items()},
            objects=doc["objects"],
            background_attestation=bool(doc.get("background_attestation", False)),
        )

    def save(self, path: str | Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "GenerationManifest":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def sha256(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class AnnotationRecord:
    image_id: str
    class_id: int
    bbox: BBox
    object_id: str
    backend_id: str
    seed: int

    def to_dict(self) -> dict:
        return {"image_id": self.image_id, "class_id": self.class_id,
                "bbox": self.bbox.to_list(), "object_id": self.object_id,
                "backend_id": self.backend_id, "seed": self.seed}


@dataclass
class DatasetStats:
    per_class: dict[str, int]
    per_split: dict[str, int]
    total: int

    def to_dict(self) -> dict:
        return {"per_class": self.per_class, "per_split": self.per_split,
                "total": self.total}


def _shuffled(items: list, rng: SplitMix64) -> list:
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.next_below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def _partition_backgrounds(catalog: list[BackgroundInfo], split_sizes: dict[str, int],
                           master_seed: int) -> dict[str, list[str]]:
    nonzero = [(name, size) for name, size in split_sizes.items() if size > 0]
    assignments: dict[str, list[str]] = {name: [] for name in split_sizes}
    if not nonzero:
        return assignments
    if len(catalog) < len(nonzero):
        raise InsufficientBackgrounds(
            f"{len(catalog)} backgrounds cannot cover {len(nonzero)} non-empty splits")
    ids = _shuffled([b.background_id for b in catalog],
                    SplitMix64(hash64(master_seed, _BG_SHUFFLE_SALT)))
    total = sum(size for _, size in nonzero)
    cursor = 0
    remaining = len(ids)
    for i, (name, size) in enumerate(nonzero):
        if i == len(nonzero) - 1:
            count = remaining
        else:
            count = max(1, round(len(ids) * size / total))
            count = min(count, remaining - (len(nonzero) - 1 - i))
        assignments[name] = sorted(ids[cursor:cursor + count])
        cursor += count
        remaining -= count
    return assignments


def _expand_quotas(class_quotas: dict[str, int], palette: ClassPalette,
                   total_items: int, master_seed: int) -> list[int]:
    for name in class_quotas:
        palette.id_of(name)  # raises UnknownClass on a bad name
    counts = [class_quotas.get(name, 0) for name in palette.names]
    if any(c < 0 for c in counts):
        raise ValueError("class quotas must be >= 0")
    if sum(counts) != total_items:
        raise ValueError(
            f"class quotas sum to {sum(counts)}, but the run has {total_items} items")
    seq = [cid for cid, c in enumerate(counts) for _ in range(c)]
    return _shuffled(seq, SplitMix64(hash64(master_seed, _QUOTA_SHUFFLE_SALT)))


def plan_dataset(split_sizes: dict[str, int], placement_cfg: PlacementConfig,
                 palette: ClassPalette, backend: BackendDescriptor,
                 backgrounds: list[BackgroundInfo], train_pool: ObjectPool,
                 heldout_pool: ObjectPool, master_seed: int,
                 merge_mode: str = "hard_paste", merge_border_px: int = 0,
                 class_quotas: dict[str, int] | None = None,
                 background_attestation: bool = False) -> GenerationManifest:
    """Plan a full run: a pure function of its inputs.

    Train items draw objects only from the train pool; every other split
    draws only from the heldout pool (test and val share it). Item seeds are
    hash64(master_seed, global_item_index).
    """
    if train_pool.pool_id != "train_pool" or heldout_pool.pool_id != "heldout_pool":
        raise ValueError("pools must be passed as (train_pool, heldout_pool)")
    total_items = sum(split_sizes.values())
    split_bgs = _partition_backgrounds(backgrounds, split_sizes, master_seed)
    bg_by_id = {b.background_id: b for b in backgrounds}

    quota_seq = None
    if class_quotas is not None:
        quota_seq = _expand_quotas(class_quotas, palette, total_items, master_seed)

    mask_cache: dict[str, np.ndarray] = {}

    def cached_mask(path: str) -> np.ndarray:
        if path not in mask_cache:
            mask_cache[path] = load_mask(path)
        return mask_cache[path]

    items: list[ManifestItem] = []
    used_objects: dict[str, dict] = {}
    used_bgs: dict[str, BackgroundInfo] = {}
    global_index = 0
    for split, size in split_sizes.items():
        pool = train_pool if split == "train" else heldout_pool
        if size > 0 and len(pool) == 0:
            raise EmptyPool(f"split {split!r} needs objects but {pool.pool_id} is empty")
        bg_ids = split_bgs[split]
        for i in range(size):
            item_seed = hash64(master_seed, global_index)
            bg_id = bg_ids[SplitMix64(hash64(item_seed, _ITEM_BG_SALT)).next_below(len(bg_ids))]
            obj_rng = SplitMix64(hash64(item_seed, _ITEM_OBJ_SALT))
            if quota_seq is not None:
                class_id = quota_seq[global_index]
                candidates = pool.of_class(class_id)
                if not candidates:
                    raise EmptyPool(
                        f"{pool.pool_id} has no objects of class "
                        f"{palette.name_of(class_id)!r} required by the quota table")
                entry = candidates[obj_rng.next_below(len(candidates))]
            else:
                entry = pool.entries[obj_rng.next_below(len(pool.entries))]
            bg = bg_by_id[bg_id]
            placement = sample_placement(
                hash64(item_seed, _ITEM_PLACE_SALT), (bg.width, bg.height),
                (entry.object_id, entry.class_id, cached_mask(entry.mask_path)),
                placement_cfg)
            items.append(ManifestItem(
                item_id=f"{split}_{i:06d}", split=split, background_id=bg_id,
                placement=placement,
                prompt=build_prompt(palette.name_of(entry.class_id))))
            record = {"class_id": entry.class_id, "mask_path": entry.mask_path,
                      "pool": pool.pool_id}
            prev = used_objects.get(entry.object_id)
            if prev is not None and prev != record:
                raise ValueError(
                    f"object id {entry.object_id!r} is ambiguous: "
                    f"{prev['pool']} and {pool.pool_id} both provide it")
            used_objects[entry.object_id] = record
            used_bgs[bg_id] = bg
            global_index += 1

    return GenerationManifest(
        master_seed=master_seed, rng_algorithm=RNG_ALGORITHM, palette=palette,
        backend=backend, placement_cfg=placement_cfg, merge_mode=merge_mode,
        merge_border_px=merge_border_px, splits=split_bgs, items=items,
        backgrounds=used_bgs, objects=used_objects,
        background_attestation=background_attestation)


# ---------------------------------------------------------------------------
# execution

@dataclass
class ExecutionReport:
    stats: DatasetStats
    annotations: list[AnnotationRecord]
    failures: list[dict]
    seconds: float
    items_per_second: float


class _ItemRunner:
    """Per-process execution state: backend plus raster caches."""

    def __init__(self, manifest: GenerationManifest, backend: BackendDescriptor,
                 out_dir: Path):
        self.manifest = manifest
        self.backend = backend
        self.out_dir = out_dir
        self._bg_cache: dict[str, np.ndarray] = {}
        self._mask_cache: dict[str, np.ndarray] = {}

    def _background(self, bg_id: str) -> np.ndarray:
        if bg_id not in self._bg_cache:
            self._bg_cache[bg_id] = load_image(self.manifest.backgrounds[bg_id].path)
        return self._bg_cache[bg_id]

    def _object_mask(self, object_id: str) -> np.ndarray:
        if object_id not in self._mask_cache:
            path = self.manifest.objects[object_id]["mask_path"]
            self._mask_cache[object_id] = load_mask(path)
        return self._mask_cache[object_id]

    def run_item(self, item: ManifestItem) -> AnnotationRecord:
        m = self.manifest
        pl = item.placement
        bg = self._background(item.background_id)
        h, w = bg.shape[:2]
        if not pl.crop.fits_in(w, h):
            raise RegionOutOfBounds(
                f"planned crop {pl.crop} no longer fits background {w}x{h}")
        if not pl.crop.contains(CropRegion(pl.crop.x + pl.mask_rect.x,
                                           pl.crop.y + pl.mask_rect.y,
                                           pl.mask_rect.w, pl.mask_rect.h)):
            raise RegionOutOfBounds(f"mask rect {pl.mask_rect} escapes crop {pl.crop}")

        source_mask = self._object_mask(pl.object_ref)
        mask = scale_mask(source_mask, pl.mask_dims[0], pl.mask_dims[1])
        crop_px = extract_crop(bg, pl.crop)
        cond = compose_condition_patch(crop_px, mask, pl.mask_rect, m.palette,
                                       pl.class_id)
        if self.backend.kind == "remote_diffusion":
            req = GenerationRequest(
                class_name=m.palette.name_of(pl.class_id), class_id=pl.class_id,
                seed=pl.seed, mask_rect=pl.mask_rect, crop=crop_px,
                prompt=item.prompt)
        else:
            req = GenerationRequest(
                class_name=m.palette.name_of(pl.class_id), class_id=pl.class_id,
                seed=pl.seed, mask_rect=pl.mask_rect, conditioned=cond)
        result = generate(self.backend, req)
        merged = merge_patch(bg, result.patch, pl.crop,
                             mode=m.merge_mode, border_px=m.merge_border_px)
        save_png(self.out_dir / "images" / item.split / f"{item.item_id}.png", merged)
        bbox = derive_ground_truth(self.backend, mask, pl.mask_rect, pl.crop)
        return AnnotationRecord(
            image_id=item.item_id, class_id=pl.class_id, bbox=bbox,
            object_id=pl.object_ref, backend_id=result.backend_id, seed=pl.seed)


_worker_runner: _ItemRunner | None = None


def _worker_init(manifest_json: str, backend_dict: dict, out_dir: str) -> None:
    global _worker_runner
    _worker_runner = _ItemRunner(GenerationManifest.from_json(manifest_json),
                                 BackendDescriptor.from_dict(backend_dict),
                                 Path(out_dir))


def _worker_run(item_dict: dict) -> tuple[str, dict | None, str | None]:
    item = ManifestItem.from_dict(item_dict)
    try:
        ann = _worker_runner.run_item(item)
        return item.item_id, ann.to_dict(), None
    except CornerforgeError as exc:
        return item.item_id, None, f"{type(exc).__name__}: {exc}"


def execute_plan(manifest: GenerationManifest, backend: BackendDescriptor | None,
                 out_dir: str | Path, workers: int = 1) -> ExecutionReport:
    """Generate every item of the manifest into `out_dir`.

    Writes images/<split>/<id>.png, labels/<split>/<id>.txt, annotations.json,
    stats.json, and failures.json. Per-item failures are collected, not fatal;
    callers decide the exit policy from the report.
    """
    backend = backend or manifest.backend
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()

    results: dict[str, dict] = {}
    failures: list[dict] = []
    if workers <= 1 or len(manifest.items) <= 1:
        runner = _ItemRunner(manifest, backend, out_dir)
        for item in manifest.items:
            try:
                results[item.item_id] = runner.run_item(item).to_dict()
            except CornerforgeError as exc:
                failures.append({"item_id": item.item_id,
                                 "error": f"{type(exc).__name__}: {exc}"})
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=workers, initializer=_worker_init,
                      initargs=(manifest.to_json(), backend.to_dict(),
                                str(out_dir))) as pool:
            for item_id, ann, err in pool.imap_unordered(
                    _worker_run, [it.to_dict() for it in manifest.items],
                    chunksize=16):
                if err is None:
                    results[item_id] = ann
                else:
                    failures.append({"item_id": item_id, "error": err})

    # deterministic output order: manifest order, not completion order
    annotations = [
        AnnotationRecord(
            image_id=d["image_id"], class_id=int(d["class_id"]),
            bbox=BBox(*d["bbox"]), object_id=d["object_id"],
            backend_id=d["backend_id"], seed=int(d["seed"]))
        for it in manifest.items if (d := results.get(it.item_id)) is not None
    ]
    failures.sort(key=lambda f: f["item_id"])

    images = manifest_image_table(manifest)
    done_images = {a.image_id for a in annotations}
    export_yolo(annotations, {k: v for k, v in images.items() if k in done_images},
                out_dir)
    export_coco(annotations, {k: v for k, v in images.items() if k in done_images},
                manifest.palette, out_dir / "annotations.json")
    stats = dataset_stats(annotations=annotations, palette=manifest.palette,
                          splits={a.image_id: a.image_id.rsplit("_", 1)[0]
                                  for a in annotations})
    elapsed = time.perf_counter() - t0
    _write_json(out_dir / "stats.json", stats.to_dict())
    _write_json(out_dir / "failures.json", failures)
    done = len(annotations)
    return ExecutionReport(stats=stats, annotations=annotations, failures=failures,
                           seconds=elapsed,
                           items_per_second=(done / elapsed if elapsed > 0 else 0.0))


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def manifest_image_table(manifest: GenerationManifest) -> dict[str, dict]:
    """item_id -> {file_name, width, height, split} for every planned item."""
    table = {}
    for it in manifest.items:
        bg = manifest.backgrounds[it.background_id]
        table[it.item_id] = {
            "file_name": f"images/{it.split}/{it.item_id}.png",
            "width": bg.width, "height": bg.height, "split": it.split,
        }
    return table


# ---------------------------------------------------------------------------
# exports

def export_yolo(annotations: list[AnnotationRecord], images: dict[str, dict],
                out_dir: str | Path) -> list[Path]:
    """One labels/<split>/<image_id>.txt per image: `class cx cy w h`, normalized.

    Images without annotations get an empty file (negative samples).
    """
    out_dir = Path(out_dir)
    by_image: dict[str, list[AnnotationRecord]] = {k: [] for k in images}
    for ann in annotations:
        if ann.image_id not in images:
            raise MissingImage(f"annotation references unknown image {ann.image_id!r}")
        by_image[ann.image_id].append(ann)
    written = []
    for image_id in sorted(images):
        info = images[image_id]
        w, h = info["width"], info["height"]
        lines = []
        for ann in by_image[image_id]:
            b = ann.bbox
            lines.append(f"{ann.class_id} {(b.x + b.w / 2) / w:.6f} "
                         f"{(b.y + b.h / 2) / h:.6f} {b.w / w:.6f} {b.h / h:.6f}")
        path = out_dir / "labels" / info.get("split", "") / f"{image_id}.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))
        written.append(path)
    return written


def export_coco(annotations: list[AnnotationRecord], images: dict[str, dict],
                palette: ClassPalette, out_path: str | Path) -> None:
    """COCO-style JSON: absolute-pixel [x, y, w, h], annotation ids dense from 1.

    Carries object_id/backend_id/seed as extra annotation keys so the export
    round-trips back to full AnnotationRecords.
    """
    image_ids = {image_id: i + 1 for i, image_id in enumerate(sorted(images))}
    for ann in annotations:
        if ann.image_id not in image_ids:
            raise MissingImage(f"annotation references unknown image {ann.image_id!r}")
    doc = {
        "images": [{"id": image_ids[k], "file_name": images[k]["file_name"],
                    "width": images[k]["width"], "height": images[k]["height"],
                    "image_name": k, "split": images[k].get("split", "")}
                   for k in sorted(images)],
        "annotations": [{
            "id": i + 1, "image_id": image_ids[ann.image_id],
            "category_id": ann.class_id, "bbox": ann.bbox.to_list(),
            "area": ann.bbox.area, "iscrowd": 0,
            "object_id": ann.object_id, "backend_id": ann.backend_id,
            "seed": ann.seed,
        } for i, ann in enumerate(annotations)],
        "categories": [{"id": i, "name": name}
                       for i, name in enumerate(palette.names)],
    }
    _write_json(Path(out_path), doc)


def import_coco(path: str | Path) -> tuple[list[AnnotationRecord], dict[str, dict]]:
    """Inverse of export_coco (for round-trips and the eval harness)."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    id_to_name = {img["id"]: img.get("image_name", str(img["id"]))
                  for img in doc["images"]}
    images = {img.get("image_name", str(img["id"])): {
        "file_name": img["file_name"], "width": img["width"],
        "height": img["height"], "split": img.get("split", "")}
        for img in doc["images"]}
    annotations = [AnnotationRecord(
        image_id=id_to_name[a["image_id"]], class_id=int(a["category_id"]),
        bbox=BBox(*a["bbox"]), object_id=a.get("object_id", ""),
        backend_id=a.get("backend_id", ""), seed=int(a.get("seed", 0)))
        for a in doc["annotations"]]
    return annotations, images


def dataset_stats(manifest: GenerationManifest | None = None,
                  annotations: list[AnnotationRecord] | None = None,
                  palette: ClassPalette | None = None,
                  splits: dict[str, str] | None = None) -> DatasetStats:
    """Instance counts by class and image counts by split (one instance/image)."""
    if manifest is not None:
        palette = manifest.palette
        pairs = [(it.placement.class_id, it.split) for it in manifest.items]
    elif annotations is not None:
        if palette is None:
            raise ValueError("dataset_stats over annotations needs a palette")
        pairs = [(a.class_id, (splits or {}).get(a.image_id, "")) for a in annotations]
    else:
        raise ValueError("pass a manifest or annotations")
    per_class = {name: 0 for name in palette.names}
    per_split: dict[str, int] = {}
    for class_id, split in pairs:
        per_class[palette.name_of(class_id)] += 1
        per_split[split] = per_split.get(split, 0) + 1
    return DatasetStats(per_class=per_class, per_split=dict(sorted(per_split.items())),
                        total=len(pairs))
