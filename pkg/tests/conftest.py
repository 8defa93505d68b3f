import itertools
import sys

import pytest
from hypothesis import settings

from webhol.groups import alternating, cyclic
from webhol.typevec import TypeSet

settings.register_profile("default", deadline=None)
settings.load_profile("default")

BAEZ_SAWIN = ["1100", "0011", "1010", "0101"]
SIX = ["1100", "0011", "1010", "0101", "1001", "0110"]


def ts(*rows) -> TypeSet:
    if len(rows) == 1 and not isinstance(rows[0], str):
        rows = rows[0]
    return TypeSet.from_text("\n".join(rows))


def all_splittings(n: int):
    """Every set partition of range(n), as label tuples."""
    seen = set()
    for labels in itertools.product(range(n), repeat=n):
        # canonical relabelling by first occurrence
        m: dict[int, int] = {}
        canon = tuple(m.setdefault(x, len(m)) for x in labels)
        if canon not in seen:
            seen.add(canon)
            yield canon


@pytest.fixture(scope="session")
def A5():
    return alternating(5)


@pytest.fixture(scope="session")
def Z2():
    return cyclic(2)


@pytest.fixture(scope="session")
def Z3():
    return cyclic(3)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
