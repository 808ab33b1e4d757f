import numpy as np
import pytest
from hypothesis import settings

from qaevo.problems import make_bv_suite, make_search_suite

settings.register_profile("qaevo", deadline=None, max_examples=60)
settings.load_profile("qaevo")


@pytest.fixture(scope="session")
def bv3():
    return make_bv_suite(3)


@pytest.fixture(scope="session")
def search3():
    return make_search_suite(3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ------------------------------------------------------------------ acceptance report

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.skipped):
        status = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        _CRITERIA[number] = (status, title)
    elif report.failed:
        _CRITERIA[number] = ("FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title = _CRITERIA[number]
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
