import pytest

from mfcover.catalog import load_catalog
from mfcover.series import Field, Ring


@pytest.fixture(scope="session")
def F():
    return Field(32003)


@pytest.fixture(scope="session")
def Q():
    return Field(None)


@pytest.fixture(scope="session")
def e6():
    return load_catalog("E6")


@pytest.fixture(scope="session")
def e8():
    return load_catalog("E8")


@pytest.fixture(scope="session")
def xy(F):
    return Ring("x,y", F)


CRITERIA = {}


def record(number, ok, detail=""):
    CRITERIA[number] = (ok, detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
