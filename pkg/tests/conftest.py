import pytest

from skewbox import BuildConfig, build


@pytest.fixture(scope="session")
def state6():
    return build(BuildConfig(depth=6, orbit_horizon=24))


@pytest.fixture(scope="session")
def state4():
    return build(BuildConfig(depth=4))


@pytest.fixture(scope="session")
def state2():
    return build(BuildConfig(depth=2))


# one line per acceptance criterion, replayed in the terminal summary
ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
