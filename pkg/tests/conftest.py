import pytest

from komparo import builtin, make_grid

EXMUPPER_S = [-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 3.0]


@pytest.fixture(scope="session")
def line():
    """[-5, 5] with 1001 points, step 0.01."""
    return make_grid([-5.0, 5.0], 1001, symmetric=True)


@pytest.fixture(scope="session")
def exm():
    return builtin("exmupper_f"), builtin("identity_1d")


# one PASS/FAIL line per acceptance criterion, printed after the run

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    failed = rep.failed or (rep.when == "call" and rep.outcome != "passed")
    if rep.when == "call" or failed:
        prev = _CRITERIA.get(number, (title, True))[1]
        _CRITERIA[number] = (title, prev and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
