from pathlib import Path

import numpy as np
import pytest

from torsion_forge.core import config as config_module

FIXTURES = Path(__file__).resolve().parents[1] / "config" / "fixtures"

REGULAR_ALPHA = np.pi / 4
REGULAR_GRAM_DET = -5.5784271247461898


@pytest.fixture(autouse=True)
def clean_config(monkeypatch):
    for name in ("TORSION_FORGE_TOL", "TORSION_FORGE_SEED", "TORSION_FORGE_LOG_LEVEL", "TORSION_FORGE_CONFIG"):
        monkeypatch.delenv(name, raising=False)
    config_module.reset_config()
    yield
    config_module.reset_config()


@pytest.fixture
def rng():
    return np.random.default_rng(20240229)


@pytest.fixture
def fixture_path():
    def resolve(name: str) -> str:
        return str(FIXTURES / name)
    return resolve
