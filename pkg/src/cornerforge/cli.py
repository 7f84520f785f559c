"""Command-line front end.

Exit codes are a stable contract: 0 success, 1 usage or configuration error,
2 runtime or backend failure.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import time
from pathlib import Path

import click

from . import evaluation
from .backends import BackendDescriptor
from .conditioning import classify_zones, compose_condition_patch
from .config import RunConfig, load_run_config
from .conformance import format_results, run_conformance
from .dataset import (
    GenerationManifest,
    ObjectPool,
    dataset_stats,
    execute_plan,
    plan_dataset,
    scan_backgrounds,
)
from .errors import (
    ConfigInvalid,
    CornerforgeError,
    EmptyClassName,
    ExecutionFailed,
    MalformedInput,
    ProtocolError,
    UnknownClass,
)
from .imaging import extract_crop, load_image, save_png, scale_mask
from .placement import sample_placement
from .protocol import WIRE_KINDS, StubServer

_USAGE_ERRORS = (ConfigInvalid, MalformedInput, UnknownClass, EmptyClassName)


@click.group()
def cli():
    """Plan, generate, and evaluate synthetic aerial-object datasets."""


def _scan_pools(cfg: RunConfig) -> tuple[ObjectPool, ObjectPool]:
    train = ObjectPool.scan(cfg.pool_dirs["train"], "train_pool", cfg.palette)
    heldout = ObjectPool.scan(cfg.pool_dirs["heldout"], "heldout_pool", cfg.palette)
    return train, heldout


def _plan_from_config(cfg: RunConfig, seed: int | None) -> GenerationManifest:
    train_pool, heldout_pool = _scan_pools(cfg)
    backgrounds = scan_backgrounds(cfg.background_dir, cfg.effective_min_side())
    return plan_dataset(
        split_sizes=cfg.splits, placement_cfg=cfg.placement, palette=cfg.palette,
        backend=cfg.backend, backgrounds=backgrounds, train_pool=train_pool,
        heldout_pool=heldout_pool,
        master_seed=cfg.master_seed if seed is None else seed,
        merge_mode=cfg.merge_mode, merge_border_px=cfg.merge_border_px,
        class_quotas=cfg.class_quotas,
        background_attestation=cfg.background_attestation)


@cli.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Run config (TOML).")
@click.option("--seed", type=int, default=None,
              help="Override the config's master seed.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Manifest path (default: <output_dir>/manifest.json).")
def plan(config_path, seed, out_path):
    """Derive a run manifest from a config; printing is side-effect free."""
    cfg = load_run_config(config_path)
    manifest = _plan_from_config(cfg, seed)
    out = Path(out_path) if out_path else cfg.output_dir / "manifest.json"
    manifest.save(out)
    stats = dataset_stats(manifest=manifest)
    split_text = ", ".join(f"{k} {v}" for k, v in stats.per_split.items())
    click.echo(f"manifest written: {out}")
    click.echo(f"items: {stats.total} ({split_text})")
    for name, count in stats.per_class.items():
        click.echo(f"  {name}: {count}")
    click.echo("backgrounds: " + ", ".join(
        f"{k} {len(v)}" for k, v in manifest.splits.items()))
    click.echo(f"sha256: {manifest.sha256()}")


def _override_backend(backend: BackendDescriptor, url: str) -> BackendDescriptor:
    if backend.kind == "procedural":
        return BackendDescriptor(kind="remote_mask_conditioned", endpoint=url,
                                 gt_rule="mask_rect_tight",
                                 timeout_s=backend.timeout_s)
    return dataclasses.replace(backend, endpoint=url)


@cli.command()
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--backend-url", default=None,
              help="Send generation to this endpoint instead of the "
                   "manifest's backend.")
@click.option("--force", is_flag=True,
              help="Write into a non-empty output directory.")
def generate(manifest_path, out_dir, workers, backend_url, force):
    """Execute a manifest into an output directory."""
    manifest = GenerationManifest.load(manifest_path)
    if not manifest.background_attestation:
        raise ConfigInvalid(
            "manifest was planned without background_attestation = true; "
            "confirm background suitability in the run config and re-plan")
    backend = manifest.backend
    if backend_url:
        backend = _override_backend(backend, backend_url)
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()) and not force:
        raise ConfigInvalid(
            f"output directory {out} is not empty; pass --force to reuse it")
    report = execute_plan(manifest, backend, out, workers=workers)
    done = len(report.annotations)
    click.echo(f"generated {done}/{len(manifest.items)} images in "
               f"{report.seconds:.1f}s ({report.items_per_second:.1f} images/s)")
    click.echo(f"outputs: {out}")
    if report.failures:
        raise ExecutionFailed(
            f"{len(report.failures)} of {len(manifest.items)} items failed; "
            f"see {out / 'failures.json'}")


def _load_gt(path: Path):
    """COCO export (.json) or JSONL; returns (boxes, class-name table)."""
    if path.suffix.lower() == ".json":
        boxes = evaluation.load_ground_truth_coco(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            names = {int(c["id"]): str(c["name"])
                     for c in doc.get("categories", [])}
        except (ValueError, TypeError, KeyError) as exc:
            raise MalformedInput(f"{path}: bad categories table ({exc})") from exc
        return boxes, (names or None)
    return evaluation.load_ground_truth_jsonl(path), None


@cli.command("evaluate")
@click.option("--gt", "gt_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Ground truth: dataset annotations.json or JSONL boxes.")
@click.option("--pred", "pred_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Predictions, one JSON object per line.")
@click.option("--conf-threshold", type=float,
              default=evaluation.DEFAULT_CONFIDENCE_THRESHOLD, show_default=True,
              help="Confidence cut for the single precision/recall numbers.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Also write report.json and report.txt here.")
@click.option("--reference", is_flag=True,
              help="Print the published real-vs-synthetic baseline table "
                   "alongside the report.")
def evaluate_cmd(gt_path, pred_path, conf_threshold, out_dir, reference):
    """Score predictions against ground truth."""
    gt, names = _load_gt(Path(gt_path))
    dets = evaluation.load_detections_jsonl(pred_path)
    report = evaluation.evaluate(dets, gt,
                                 report_confidence_threshold=conf_threshold,
                                 class_names=names)
    click.echo(report.to_text(), nl=False)
    if reference:
        gap = evaluation.domain_gap_report(evaluation.REFERENCE_BASELINE["real"],
                                           evaluation.REFERENCE_BASELINE["synthetic"])
        click.echo("\npublished baseline, real vs synthetic-trained "
                   "(fixed reference values):")
        click.echo(evaluation.format_domain_gap(gap), nl=False)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
        (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
        click.echo(f"report written: {out / 'report.json'}")


def _stats_from_dataset(dataset_dir: Path):
    ann_path = dataset_dir / "annotations.json"
    if not ann_path.exists():
        return {}, {}, 0
    try:
        doc = json.loads(ann_path.read_text(encoding="utf-8"))
        names = {int(c["id"]): str(c["name"]) for c in doc["categories"]}
        split_of = {img["id"]: img.get("split", "") for img in doc["images"]}
        per_class = {name: 0 for name in names.values()}
        per_split: dict[str, int] = {}
        for ann in doc["annotations"]:
            per_class[names[int(ann["category_id"])]] += 1
            split = split_of.get(ann["image_id"], "")
            per_split[split] = per_split.get(split, 0) + 1
        return per_class, dict(sorted(per_split.items())), len(doc["annotations"])
    except (ValueError, TypeError, KeyError) as exc:
        raise MalformedInput(f"{ann_path}: not a readable annotation export "
                             f"({exc})") from exc


@cli.command()
@click.option("--manifest", "manifest_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--dataset", "dataset_dir", default=None,
              type=click.Path(exists=True, file_okay=False))
def stats(manifest_path, dataset_dir):
    """Class and split counts for a manifest or a generated dataset."""
    if (manifest_path is None) == (dataset_dir is None):
        raise click.UsageError("pass exactly one of --manifest / --dataset")
    if manifest_path:
        s = dataset_stats(manifest=GenerationManifest.load(manifest_path))
        per_class, per_split, total = s.per_class, s.per_split, s.total
    else:
        per_class, per_split, total = _stats_from_dataset(Path(dataset_dir))
    for name, count in per_class.items():
        click.echo(f"{name:>24}  {count}")
    for name, count in per_split.items():
        click.echo(f"{('split ' + name):>24}  {count}")
    click.echo(f"{'total':>24}  {total}")


@cli.command("compose-debug")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--object", "object_id", required=True,
              help="Pool object id, <pool>/<class dir>/<file stem>; the pool "
                   "prefix may be dropped when the rest is unambiguous.")
@click.option("--background", "background_id", required=True,
              help="Background id from the catalog (relative path, no suffix).")
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              default="compose_debug.png", show_default=True)
def compose_debug(config_path, object_id, background_id, seed, out_path):
    """Write one conditioned patch as PNG plus a JSON sidecar with a
    zone self-check."""
    cfg = load_run_config(config_path)
    train_pool, heldout_pool = _scan_pools(cfg)
    candidates = [e for pool in (train_pool, heldout_pool) for e in pool.entries
                  if e.object_id == object_id
                  or e.object_id.endswith("/" + object_id)]
    if not candidates:
        raise click.UsageError(f"object id {object_id!r} is in neither pool")
    if len(candidates) > 1:
        names = ", ".join(e.object_id for e in candidates)
        raise click.UsageError(f"object id {object_id!r} is ambiguous: {names}")
    entry = candidates[0]
    catalog = {b.background_id: b
               for b in scan_backgrounds(cfg.background_dir,
                                         cfg.effective_min_side())}
    if background_id not in catalog:
        raise click.UsageError(f"background id {background_id!r} not found "
                               f"under {cfg.background_dir}")
    bg_info = catalog[background_id]
    from .imaging import load_mask  # local import keeps the module list tidy

    mask = load_mask(entry.mask_path)
    placement = sample_placement(seed, (bg_info.width, bg_info.height),
                                 (entry.object_id, entry.class_id, mask),
                                 cfg.placement)
    background = load_image(bg_info.path)
    crop_px = extract_crop(background, placement.crop)
    scaled = scale_mask(mask, placement.mask_dims[0], placement.mask_dims[1])
    patch = compose_condition_patch(crop_px, scaled, placement.mask_rect,
                                    cfg.palette, entry.class_id)
    zones = classify_zones(patch, crop_px, cfg.palette.color_of(entry.class_id))
    out = Path(out_path)
    save_png(out, patch.pixels)
    sidecar = {
        "class_id": entry.class_id,
        "class_name": cfg.palette.name_of(entry.class_id),
        "object_id": entry.object_id,
        "background_id": background_id,
        "seed": seed,
        "crop": placement.crop.to_dict(),
        "mask_rect": placement.mask_rect.to_dict(),
        "zones": {k: zones[k] for k in
                  ("mask_pixels", "surround_pixels", "context_pixels",
                   "violation_count")},
    }
    out.with_suffix(".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"patch written: {out} (zone violations: "
               f"{zones['violation_count']})")


@cli.command()
@click.option("--url", required=True, help="Backend base URL.")
@click.option("--size", type=int, default=256, show_default=True,
              help="Probe patch side length.")
@click.option("--kind", type=click.Choice(WIRE_KINDS), default=None,
              help="Request kind (default: what the backend's /v1/health "
                   "advertises).")
@click.option("--timeout", "timeout_s", type=float, default=30.0,
              show_default=True)
def conformance(url, size, kind, timeout_s):
    """Run the wire-protocol conformance checks against a live backend."""
    results = run_conformance(url, size=size, kind=kind, timeout_s=timeout_s)
    click.echo(format_results(results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise ProtocolError(f"conformance failed: {', '.join(failed)}")


@cli.command("stub-server")
@click.option("--kind", type=click.Choice(WIRE_KINDS), default="mask_conditioned",
              show_default=True)
def stub_server(kind):
    """Serve the shape-echo stub backend until interrupted (for manual
    conformance runs)."""
    with StubServer(kind=kind) as srv:
        click.echo(f"stub {kind} backend listening at {srv.url} "
                   f"(Ctrl+C to stop)")
        try:
            while True:
                time.sleep(3600)
        except KeyboardInterrupt:
            click.echo("stopped")


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("CORNERFORGE_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s")
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except _USAGE_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except CornerforgeError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
