"""Collects acceptance outcomes and prints one line per criterion."""

from collections import defaultdict

import pytest

_outcomes: dict[int, list[bool]] = defaultdict(list)
_titles: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion this test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args))


@pytest.hookimpl(trylast=True)
def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    number, title = crit
    _titles[number] = title
    if report.when == "call" or report.failed or report.skipped:
        _outcomes[number].append(report.passed and report.when == "call")


def pytest_terminal_summary(terminalreporter):
    if not _titles:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_titles):
        ok = bool(_outcomes[number]) and all(_outcomes[number])
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {_titles[number]}")
