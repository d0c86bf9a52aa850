import pytest
from hypothesis import HealthCheck, settings

from linfty.graded import GradedSpace
from linfty.scalars import Context

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")


@pytest.fixture
def ctx():
    return Context(3, 4)


@pytest.fixture
def mixed_space():
    """Four basis vectors, two even and two odd after the shift to L[1]."""
    return GradedSpace([("a", 0), ("b", 1), ("c", 1), ("d", 2)]).shift(1)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[k])
