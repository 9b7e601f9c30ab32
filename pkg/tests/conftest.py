import os

import pytest
from hypothesis import HealthCheck, settings

from cstar_rays import presets
from cstar_rays.logspace import LogTransform

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def transforms():
    """LogTransform per preset, built once per session."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = LogTransform(presets.preset(name))
        return cache[name]

    return get


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
