from pathlib import Path

import pytest

from helpers import FIXTURES

_criteria: dict[tuple[int, str], bool] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    key = tuple(marker.args)
    _criteria[key] = _criteria.get(key, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(_criteria.items()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:>2}. {title}")


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
