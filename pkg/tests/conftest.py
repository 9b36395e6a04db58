import pytest
from hypothesis import settings

from stenzel_monopoles.stenzel_geometry import FlatProfile, build_profile

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture(scope="session")
def profile():
    return build_profile(1.0)


@pytest.fixture(scope="session")
def flat():
    return FlatProfile()


@pytest.fixture
def acceptance_log(request):
    """Collect one summary line per acceptance criterion."""
    lines = request.config.stash.setdefault(_LINES, [])
    return lines.append


_LINES = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
