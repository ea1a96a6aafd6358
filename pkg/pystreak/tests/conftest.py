import logging
import os

import pytest

from pystreak.config import get_settings


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are read from the environment once per process; reset around every test."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop handlers that setup_logging attached during a test and restore the level."""
    logger = logging.getLogger("pystreak")
    level = logger.level
    yield
    for handler in list(logger.handlers):
        if getattr(handler, "_pystreak", False):
            logger.removeHandler(handler)
    logger.setLevel(level)


@pytest.fixture
def temp_path(request):
    """A pytest fixture to create a temporary file path and clean it up after the test."""
    name = request.node.name.replace("[", "_").replace("]", "")
    path = f"test_{name}.csv"
    yield path
    if os.path.exists(path):
        os.remove(path)
