import zlib

import pytest

from minrank_pke.rng import Rng


@pytest.fixture
def rng(request):
    # one deterministic stream per test, keyed by the test's node id
    return Rng(zlib.crc32(request.node.nodeid.encode()))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
