import io

import pytest

from src.core_tools.logger import configure_logging
from src.core_tools.settings import get_settings


@pytest.fixture(autouse=True)
def quiet_logging():
    configure_logging("WARNING", use_colors=False)
    yield
    configure_logging("INFO", use_colors=True)


@pytest.fixture
def fresh_settings(monkeypatch):
    """Clears the cached settings before and after a test that patches the environment."""
    get_settings.cache_clear()
    yield monkeypatch
    get_settings.cache_clear()


@pytest.fixture
def log_buffer():
    return io.StringIO()
