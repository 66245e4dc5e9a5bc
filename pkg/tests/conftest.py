import pytest

from qsim import build_hamiltonian, diagonalize, group_hamiltonian, h2_table
from qsim.golden import load_golden


@pytest.fixture(scope="session")
def h2():
    return h2_table()


@pytest.fixture(scope="session")
def h2_grouped(h2):
    return group_hamiltonian(h2)


@pytest.fixture(scope="session")
def h2_ham(h2):
    return build_hamiltonian(h2)


@pytest.fixture(scope="session")
def h2_spectrum(h2_ham):
    return diagonalize(h2_ham)


@pytest.fixture(scope="session")
def golden():
    return load_golden()


# --------------------------------------------------------------------------
# acceptance report: one line per criterion after the run

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    prev = _CRITERIA.get(number)
    _CRITERIA[number] = (title, ok and (prev is None or prev[1]), call.duration + (prev[2] if prev else 0))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, seconds = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({seconds:.2f} s)")
