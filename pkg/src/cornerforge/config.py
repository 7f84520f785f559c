"""Run configuration: a TOML file describing one dataset run.

Relative paths in the file resolve against the config file's directory.
`background_attestation` is the operator's confirmation that the background
set meets the sampling assumptions (clear upper half, no airborne objects
already present); planning works without it, generation refuses.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .backends import BACKEND_KINDS, GT_RULES, BackendDescriptor
from .errors import ConfigInvalid
from .imaging import ClassPalette
from .placement import PlacementConfig
from .rng import RNG_ALGORITHM

CONFIG_SCHEMA_VERSION = 1
MERGE_MODES = ("hard_paste", "feather")

# The eight airborne classes of the published run this pipeline replicates,
# each keyed to a maximally separated non-black RGB color. Overridable per
# run via [palette].
DEFAULT_PALETTE_ENTRIES = [
    ("Large Airplane", (255, 0, 0)),
    ("Small Airplane", (0, 255, 0)),
    ("Very Small Airplane", (0, 0, 255)),
    ("Helicopter", (255, 255, 0)),
    ("Drone", (255, 0, 255)),
    ("Hot Air Balloon", (0, 255, 255)),
    ("Paraglider", (255, 255, 255)),
    ("Airship", (255, 128, 0)),
]

# Class mix and split sizes of that published run (7080 images total).
REFERENCE_CLASS_DISTRIBUTION = {
    "Large Airplane": 1695,
    "Small Airplane": 1255,
    "Very Small Airplane": 46,
    "Helicopter": 2201,
    "Drone": 961,
    "Hot Air Balloon": 315,
    "Paraglider": 565,
    "Airship": 42,
}
REFERENCE_SPLIT_SIZES = {"train": 5900, "test": 590, "val": 590}


def default_palette() -> ClassPalette:
    return ClassPalette(DEFAULT_PALETTE_ENTRIES)


@dataclass
class RunConfig:
    master_seed: int
    output_dir: Path
    background_dir: Path
    pool_dirs: dict[str, Path]          # {"train": ..., "heldout": ...}
    splits: dict[str, int]
    palette: ClassPalette
    placement: PlacementConfig
    backend: BackendDescriptor
    merge_mode: str = "hard_paste"
    merge_border_px: int = 0
    background_attestation: bool = False
    min_background_side: int | None = None   # default: crop_size
    class_quotas: dict[str, int] | None = None
    source: Path | None = None

    def effective_min_side(self) -> int:
        return (self.min_background_side if self.min_background_side is not None
                else self.placement.crop_size)

    def require_attestation(self) -> None:
        if not self.background_attestation:
            raise ConfigInvalid(
                "background_attestation: must be true before generating — "
                "confirm the backgrounds have a clear upper half and contain "
                "no airborne objects")


def _want(table: dict, key: str, kind, where: str):
    if key not in table:
        raise ConfigInvalid(f"{where}{key}: required key is missing")
    return _typed(table[key], key, kind, where)


def _typed(value, key: str, kind, where: str):
    # bool is an int subclass; keep the two distinct
    if kind is int and isinstance(value, bool):
        raise ConfigInvalid(f"{where}{key}: expected an integer")
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigInvalid(
            f"{where}{key}: expected {getattr(kind, '__name__', kind)}, "
            f"got {type(value).__name__}")
    return value


def _existing_dir(path_text: str, base: Path, field_name: str) -> Path:
    path = (base / path_text).resolve() if not Path(path_text).is_absolute() \
        else Path(path_text)
    if not path.is_dir():
        raise ConfigInvalid(f"{field_name}: directory {path} does not exist")
    return path


def _parse_palette(doc: dict) -> ClassPalette:
    if "palette" not in doc:
        return default_palette()
    entries = _want(doc["palette"], "entries", list, "palette.")
    pairs = []
    for i, entry in enumerate(entries):
        if (not isinstance(entry, list) or len(entry) != 2
                or not isinstance(entry[0], str) or not isinstance(entry[1], list)
                or len(entry[1]) != 3):
            raise ConfigInvalid(
                f"palette.entries[{i}]: expected [\"name\", [r, g, b]]")
        pairs.append((entry[0], tuple(int(v) for v in entry[1])))
    try:
        return ClassPalette(pairs)
    except (ValueError, TypeError) as exc:
        raise ConfigInvalid(f"palette.entries: {exc}") from exc


def _parse_placement(doc: dict) -> PlacementConfig:
    table = doc.get("placement", {})
    table = _typed(table, "placement", dict, "")
    known = {"vertical_fraction", "crop_size", "mask_scale_range", "edge_margin"}
    for key in table:
        if key not in known:
            raise ConfigInvalid(f"placement.{key}: unknown key")
    kwargs = {}
    if "vertical_fraction" in table:
        kwargs["vertical_fraction"] = _typed(table["vertical_fraction"],
                                             "vertical_fraction", float, "placement.")
    if "crop_size" in table:
        kwargs["crop_size"] = _typed(table["crop_size"], "crop_size", int,
                                     "placement.")
    if "mask_scale_range" in table:
        rng = _typed(table["mask_scale_range"], "mask_scale_range", list,
                     "placement.")
        if len(rng) != 2:
            raise ConfigInvalid("placement.mask_scale_range: expected [min, max]")
        kwargs["mask_scale_range"] = (float(rng[0]), float(rng[1]))
    if "edge_margin" in table:
        kwargs["edge_margin"] = _typed(table["edge_margin"], "edge_margin", int,
                                       "placement.")
    try:
        return PlacementConfig(**kwargs)
    except ValueError as exc:
        raise ConfigInvalid(f"placement: {exc}") from exc


def _parse_backend(doc: dict) -> BackendDescriptor:
    table = doc.get("backend")
    if table is None:
        return BackendDescriptor.procedural()
    table = _typed(table, "backend", dict, "")
    kind = _want(table, "kind", str, "backend.")
    if kind not in BACKEND_KINDS:
        raise ConfigInvalid(f"backend.kind: {kind!r} is not one of {BACKEND_KINDS}")
    kwargs = {"kind": kind}
    if "endpoint" in table:
        kwargs["endpoint"] = _typed(table["endpoint"], "endpoint", str, "backend.")
    if "gt_rule" in table:
        rule = _typed(table["gt_rule"], "gt_rule", str, "backend.")
        if rule not in GT_RULES:
            raise ConfigInvalid(f"backend.gt_rule: {rule!r} is not one of {GT_RULES}")
        kwargs["gt_rule"] = rule
    elif kind == "remote_diffusion":
        kwargs["gt_rule"] = "whole_patch"
    if "timeout_s" in table:
        kwargs["timeout_s"] = _typed(table["timeout_s"], "timeout_s", float,
                                     "backend.")
    try:
        return BackendDescriptor(**kwargs)
    except ValueError as exc:
        raise ConfigInvalid(f"backend: {exc}") from exc


def load_run_config(path: str | Path) -> RunConfig:
    """Parse and validate a run config; every error names the field."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigInvalid(f"config file {path} does not exist") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigInvalid(f"{path}: not valid TOML ({exc})") from exc
    base = path.resolve().parent

    version = _want(doc, "schema_version", int, "")
    if version != CONFIG_SCHEMA_VERSION:
        raise ConfigInvalid(f"schema_version: {version} is not supported "
                            f"(expected {CONFIG_SCHEMA_VERSION})")
    if "rng_algorithm" in doc:
        tag = _typed(doc["rng_algorithm"], "rng_algorithm", str, "")
        if tag != RNG_ALGORITHM:
            raise ConfigInvalid(f"rng_algorithm: {tag!r} is not the supported "
                                f"{RNG_ALGORITHM!r}")

    master_seed = _want(doc, "master_seed", int, "")
    if not 0 <= master_seed < 2 ** 64:
        raise ConfigInvalid("master_seed: must be in [0, 2^64)")

    output_dir_text = _want(doc, "output_dir", str, "")
    output_dir = (base / output_dir_text) if not Path(output_dir_text).is_absolute() \
        else Path(output_dir_text)
    background_dir = _existing_dir(_want(doc, "background_dir", str, ""),
                                   base, "background_dir")
    attestation = doc.get("background_attestation", False)
    attestation = _typed(attestation, "background_attestation", bool, "")

    pools_table = _want(doc, "pools", dict, "")
    pool_dirs = {}
    for key in ("train", "heldout"):
        pool_dirs[key] = _existing_dir(_want(pools_table, key, str, "pools."),
                                       base, f"pools.{key}")

    splits_table = _want(doc, "splits", dict, "")
    if not splits_table:
        raise ConfigInvalid("splits: at least one split is required")
    splits = {}
    for name, size in splits_table.items():
        size = _typed(size, name, int, "splits.")
        if size < 0:
            raise ConfigInvalid(f"splits.{name}: must be >= 0")
        splits[name] = size

    palette = _parse_palette(doc)
    placement = _parse_placement(doc)
    backend = _parse_backend(doc)

    merge_table = _typed(doc.get("merge", {}), "merge", dict, "")
    merge_mode = merge_table.get("mode", "hard_paste")
    merge_mode = _typed(merge_mode, "mode", str, "merge.")
    if merge_mode not in MERGE_MODES:
        raise ConfigInvalid(f"merge.mode: {merge_mode!r} is not one of {MERGE_MODES}")
    merge_border = _typed(merge_table.get("border_px", 0), "border_px", int, "merge.")
    if merge_border < 0:
        raise ConfigInvalid("merge.border_px: must be >= 0")
    if merge_mode == "feather" and merge_border < 1:
        raise ConfigInvalid("merge.border_px: feather mode needs a border >= 1")

    min_side = None
    if "min_background_side" in doc:
        min_side = _typed(doc["min_background_side"], "min_background_side",
                          int, "")
        if min_side < placement.crop_size:
            raise ConfigInvalid("min_background_side: must be >= placement."
                                f"crop_size ({placement.crop_size})")

    quotas = None
    if "class_quotas" in doc:
        quotas_table = _typed(doc["class_quotas"], "class_quotas", dict, "")
        quotas = {}
        for name, count in quotas_table.items():
            if name not in palette.names:
                raise ConfigInvalid(f"class_quotas.{name}: not a palette class")
            count = _typed(count, name, int, "class_quotas.")
            if count < 0:
                raise ConfigInvalid(f"class_quotas.{name}: must be >= 0")
            quotas[name] = count

    return RunConfig(master_seed=master_seed, output_dir=output_dir,
                     background_dir=background_dir, pool_dirs=pool_dirs,
                     splits=splits, palette=palette, placement=placement,
                     backend=backend, merge_mode=merge_mode,
                     merge_border_px=merge_border,
                     background_attestation=attestation,
                     min_background_side=min_side, class_quotas=quotas,
                     source=path)
