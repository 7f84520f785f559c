import sys
from pathlib import Path

import numpy as np
import pytest

# make tests/oracles.py and tests/helpers.py importable as plain modules
sys.path.insert(0, str(Path(__file__).parent))

from helpers import build_workspace, config_text  # noqa: E402


@pytest.fixture
def nprng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def small_workspace(tmp_path_factory):
    """Three-class workspace shared by read-only pipeline tests."""
    root = tmp_path_factory.mktemp("ws")
    build_workspace(root, {"Large Airplane": (3, 2),
                           "Helicopter": (3, 2),
                           "Drone": (2, 2)},
                    n_backgrounds=6)
    palette = ('entries = [["Large Airplane", [255, 0, 0]], '
               '["Helicopter", [255, 255, 0]], ["Drone", [255, 0, 255]]]')
    (root / "run.toml").write_text(
        config_text(splits={"train": 12, "test": 4, "val": 4},
                    palette_lines=palette),
        encoding="utf-8")
    return root
