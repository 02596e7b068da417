from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from crnid.crn import load_crn

NETWORKS = Path(__file__).resolve().parent.parent / "networks"

settings.register_profile("crnid", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("crnid")


def network(name: str):
    return load_crn(NETWORKS / f"{name}.crn")


@pytest.fixture
def networks_dir() -> Path:
    return NETWORKS


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for i in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[i])
