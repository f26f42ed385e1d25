import random

import pytest

from iterstbc.cyclic_algebra import CyclicAlgebra
from iterstbc.tower import tower_6x3, tower_8x4


@pytest.fixture(scope="session")
def t63():
    return tower_6x3()


@pytest.fixture(scope="session")
def t84():
    return tower_8x4()


@pytest.fixture(scope="session")
def D63(t63):
    return CyclicAlgebra(t63, -1)


@pytest.fixture(scope="session")
def D84(t84):
    return CyclicAlgebra(t84, -1)


@pytest.fixture
def rng():
    return random.Random(20240601)


# -- acceptance reporting: one PASS/FAIL line per criterion ----------------------------

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, text = marker.args
    status = "PASS" if rep.passed else "FAIL"
    line = f"criterion {number}: {status} ({rep.duration:.1f} s) {text}"
    item.config.stash[ACCEPTANCE].append((number, line))
    print(f"\n{line}")


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
