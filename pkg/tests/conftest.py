import numpy as np
import pytest

from pdirichlet import catalog


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def bridge():
    return catalog.bridge_family()


@pytest.fixture(params=["I", "II", "III", "IV"])
def triangles(request):
    return catalog.triangles_family(request.param)


@pytest.fixture
def chain4():
    return catalog.chain_family(4)


# Acceptance tests carry @pytest.mark.criterion(n, title); the summary prints
# one pass/fail line per criterion, combining parametrized cases.
_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    mark = _marks.get(report.nodeid)
    if mark is None:
        return
    n, title = mark
    entry = _criteria.setdefault(n, [title, True, False])
    if report.when == "call":
        entry[2] = True
    if report.failed or (report.when == "call" and report.skipped):
        entry[1] = False


_marks: dict[str, tuple[int, str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _marks[item.nodeid] = (int(m.args[0]), str(m.args[1]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, passed, ran = _criteria[n]
        status = "PASS" if passed and ran else "FAIL"
        terminalreporter.write_line(f"{status} criterion {n}: {title}")
