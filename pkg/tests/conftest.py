import os

import pytest
from hypothesis import HealthCheck, settings

from frobken.ringspec import builtin

settings.register_profile(
    "ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("dev", max_examples=50, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

# one ring per distinct cone; aliases are exercised in the CLI tests
BUILTINS = ["A1", "A2", "A3", "A4", "cyclic-2-1-1", "cyclic-3-1-2", "cyclic-3-1-1",
            "cyclic-3-1-1-1", "cyclic-5-1-2", "square-cone"]
SMALL = ["A1", "A2", "cyclic-2-1-1", "cyclic-3-1-2", "cyclic-5-1-2", "square-cone"]


@pytest.fixture(params=BUILTINS)
def builtin_cone(request):
    return builtin(request.param).cone


@pytest.fixture
def a1():
    return builtin("sing-A1").cone


@pytest.fixture
def a2s():
    return builtin("sing-A2").cone


@pytest.fixture
def conifold():
    return builtin("square-cone").cone


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
