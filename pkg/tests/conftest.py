"""Collects acceptance outcomes and prints one line per criterion."""

import pytest

_OUTCOMES = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    report = outcome.get_result()
    if report.when == "call" or not report.passed:
        k, title = mark.args
        ok, _ = _OUTCOMES.get(k, (True, title))
        _OUTCOMES[k] = (ok and report.passed, title)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_OUTCOMES):
        ok, title = _OUTCOMES[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {title}")
