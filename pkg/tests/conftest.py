import pytest

from wavespec.config import ConfigManager
from wavespec.slow_evans import EvansSettings
from wavespec.wave import find_c0


@pytest.fixture(scope="session")
def orbit():
    """Singular orbit at c0; shared because the bisection is the slow part."""
    return find_c0()


@pytest.fixture(scope="session")
def settings():
    return EvansSettings()


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep the user's wavespec.conf and $WAVESPEC_OUT out of every test."""
    monkeypatch.setattr(ConfigManager, "CONFIG_PATH", tmp_path / "absent.conf")
    monkeypatch.delenv("WAVESPEC_OUT", raising=False)
