import warnings

import pytest

from kerrcat.errors import TruncationWarning
from kerrcat.fock import FockSpace
from kerrcat.params import rotating_frame_params, table1_design


@pytest.fixture(scope="session")
def design():
    return table1_design()


@pytest.fixture(scope="session")
def params(design):
    return rotating_frame_params(design)


@pytest.fixture(scope="session")
def space():
    return FockSpace((20, 20, 5))


@pytest.fixture
def quiet():
    """Silence truncation warnings inside a test."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT_LINES
    except ImportError:
        return
    if REPORT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(REPORT_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
