"""Command line: train a generator checkpoint, serve it over HTTP."""

from __future__ import annotations

import logging
from pathlib import Path

import click
import numpy as np
from PIL import Image

from .configs import DiffusionConfig, GanTrainingConfig
from .samples import TrainingSample, conditioned_rect_of
from .server import CganEngine, DiffusionEngine, GenerationServer
from .training import save_checkpoint, synthetic_training_set, train_gan


def _load_pair_dir(data_dir: Path) -> list[TrainingSample]:
    """Read x/NNN.png + y/NNN.png pairs; the rectangle is recovered from the diff."""
    x_dir, y_dir = data_dir / "x", data_dir / "y"
    if not x_dir.is_dir() or not y_dir.is_dir():
        raise click.UsageError(f"{data_dir} must contain x/ and y/ subdirectories")
    samples = []
    for x_path in sorted(x_dir.glob("*.png")):
        y_path = y_dir / x_path.name
        if not y_path.exists():
            raise click.UsageError(f"{x_path.name} has no counterpart in y/")
        with Image.open(x_path) as xi, Image.open(y_path) as yi:
            x = np.asarray(xi.convert("RGB"))
            y = np.asarray(yi.convert("RGB"))
        samples.append(TrainingSample(x=x, y=y, rect=conditioned_rect_of(x, y),
                                      class_id=-1))
    if not samples:
        raise click.UsageError(f"no sample pairs under {data_dir}")
    return samples


@click.group()
@click.option("--log-level", default="info", show_default=True,
              type=click.Choice(["debug", "info", "warning"]))
def main(log_level):
    """Train and serve neural patch generators."""
    logging.basicConfig(level=log_level.upper(),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")


@main.command()
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path),
              help="Checkpoint file to write.")
@click.option("--data", "data_dir", type=click.Path(exists=True, path_type=Path),
              help="Directory of x/ and y/ PNG pairs; omit to train on synthetic frames.")
@click.option("--synthetic", "synthetic_count", default=32, show_default=True,
              help="Synthetic sample count when --data is not given.")
@click.option("--profile", default="toy", show_default=True,
              type=click.Choice(["toy", "full"]),
              help="toy: 64x64/5 epochs for smoke runs; full: the production recipe.")
@click.option("--epochs", type=int, help="Override the profile's epoch count.")
@click.option("--seed", type=int, help="Override the training seed.")
@click.option("--device", default="cpu", show_default=True)
def train(out_path, data_dir, synthetic_count, profile, epochs, seed, device):
    """Train the conditional generator and write a checkpoint."""
    cfg = GanTrainingConfig.toy() if profile == "toy" else GanTrainingConfig()
    overrides = {}
    if epochs is not None:
        overrides["epochs"] = epochs
    if seed is not None:
        overrides["seed"] = seed
    if overrides:
        from dataclasses import replace
        cfg = replace(cfg, **overrides)

    if data_dir is not None:
        samples = _load_pair_dir(data_dir)
    else:
        samples = synthetic_training_set(synthetic_count, cfg.resolution[0],
                                         seed=cfg.seed)
    run = train_gan(samples, cfg, device=device)
    save_checkpoint(run, out_path)
    first, last = run.log[0], run.log[-1]
    click.echo(f"trained {cfg.epochs} epochs on {len(samples)} samples "
               f"in {run.seconds:.1f}s")
    click.echo(f"recon L1: {first.recon_l1:.4f} -> {last.recon_l1:.4f}")
    click.echo(f"checkpoint written: {out_path}")


@main.command()
@click.option("--checkpoint", type=click.Path(exists=True, path_type=Path),
              help="Generator checkpoint; serves the mask_conditioned kind.")
@click.option("--diffusion", "use_diffusion", is_flag=True,
              help="Serve DDIM image-to-image instead of a trained generator.")
@click.option("--steps", type=int, help="Diffusion: override sampling steps.")
@click.option("--resolution", type=int, help="Diffusion: override working resolution.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8111, show_default=True)
@click.option("--device", default="cpu", show_default=True)
def serve(checkpoint, use_diffusion, steps, resolution, host, port, device):
    """Serve a generation engine over the wire protocol until interrupted."""
    if bool(checkpoint) == bool(use_diffusion):
        raise click.UsageError("pass exactly one of --checkpoint or --diffusion")
    if use_diffusion:
        cfg = DiffusionConfig()
        changes = {}
        if steps is not None:
            changes["steps"] = steps
        if resolution is not None:
            changes["resolution"] = (resolution, resolution)
        if changes:
            from dataclasses import replace
            cfg = replace(cfg, **changes)
        engine = DiffusionEngine(cfg, device=device)
    else:
        engine = CganEngine(checkpoint, device=device)

    server = GenerationServer(engine, host=host, port=port).start()
    click.echo(f"serving {engine.kind} ({engine.backend_id}) at {server.url}")
    try:
        server._thread.join()
    except KeyboardInterrupt:
        click.echo("shutting down")
    finally:
        server.shutdown()


if __name__ == "__main__":
    main()
