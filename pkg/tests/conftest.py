import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

try:
    import cypari2
    PARI = cypari2.Pari()
    PARI.allocatemem(256 * 10**6, silent=True)
except Exception:  # PARI is an optional oracle
    PARI = None


@pytest.fixture(scope="session")
def pari():
    if PARI is None:
        pytest.skip("cypari2 not installed")
    return PARI


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
