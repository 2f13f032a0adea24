import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import corpus  # noqa: E402
from cmclab.config import resolve_metric  # noqa: E402
from cmclab.metric import flat, schwarzschild  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def schw1():
    return schwarzschild(1.0)


@pytest.fixture(scope="session")
def flat_metric():
    return flat()


@pytest.fixture(scope="session")
def dip():
    return resolve_metric("dip_metric")


@pytest.fixture(scope="session")
def dip_nonneg():
    return resolve_metric("dip_metric_nonneg")


@pytest.fixture(scope="session")
def tabulated():
    return resolve_metric("schwarzschild_tabulated")


@pytest.fixture(scope="session")
def twin_peak():
    return corpus.twin_peak()


@pytest.fixture(scope="session")
def negative_scalar():
    return corpus.negative_scalar()


@pytest.fixture(scope="session")
def degenerate():
    return corpus.degenerate_horizon()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
