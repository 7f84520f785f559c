import pytest

from patchwright import (
    GanTrainingConfig,
    save_checkpoint,
    synthetic_training_set,
    train_gan,
)

TOY_SAMPLE_COUNT = 32


@pytest.fixture(scope="session")
def toy_samples():
    return synthetic_training_set(TOY_SAMPLE_COUNT, 64, seed=3)


@pytest.fixture(scope="session")
def toy_run(toy_samples):
    """One toy training run shared by the whole suite."""
    return train_gan(toy_samples, GanTrainingConfig.toy())


@pytest.fixture(scope="session")
def toy_checkpoint(toy_run, tmp_path_factory):
    path = tmp_path_factory.mktemp("ckpt") / "toy.pt"
    save_checkpoint(toy_run, path)
    return path
