import numpy as np
import pytest
import torch

from patchwright import (
    EmptyDataset,
    GanTrainingConfig,
    ResolutionMismatch,
    load_generator,
    synthetic_training_set,
    train_gan,
)
from patchwright.training import _to_tensor, to_image


def test_toy_run_logs_every_epoch(toy_run):
    cfg = toy_run.config
    assert [s.epoch for s in toy_run.log] == list(range(cfg.epochs))
    for s in toy_run.log:
        assert s.loss_d > 0 and s.loss_g_gan > 0 and s.recon_l1 > 0


def test_toy_run_schedule_endpoints(toy_run):
    cfg = toy_run.config
    assert toy_run.log[0].lr == cfg.initial_lr
    assert toy_run.log[-1].lr == cfg.final_lr


def test_reconstruction_loss_decreases(toy_run):
    assert toy_run.log[-1].recon_l1 < toy_run.log[0].recon_l1


def test_generator_output_shape_and_range(toy_run):
    x = torch.rand(2, 3, 64, 64) * 2 - 1
    with torch.no_grad():
        out = toy_run.generator(x)
    assert out.shape == (2, 3, 64, 64)
    assert out.min() >= -1.0 and out.max() <= 1.0


def test_checkpoint_round_trip(toy_run, toy_checkpoint):
    gen, cfg = load_generator(toy_checkpoint)
    assert cfg == toy_run.config
    x = torch.rand(1, 3, 64, 64) * 2 - 1
    with torch.no_grad():
        assert torch.equal(gen(x), toy_run.generator(x))


def test_load_rejects_foreign_blob(tmp_path):
    path = tmp_path / "junk.pt"
    torch.save({"format": "something-else"}, path)
    with pytest.raises(ValueError, match="checkpoint"):
        load_generator(path)


def test_empty_dataset_rejected():
    with pytest.raises(EmptyDataset):
        train_gan([], GanTrainingConfig.toy())


def test_resolution_mismatch_rejected():
    samples = synthetic_training_set(2, 32, seed=0)
    with pytest.raises(ResolutionMismatch, match="32x32"):
        train_gan(samples, GanTrainingConfig.toy())


def test_tensor_image_round_trip():
    img = (np.arange(48 * 48 * 3).reshape(48, 48, 3) % 256).astype(np.uint8)
    assert np.array_equal(to_image(_to_tensor(img)), img)
