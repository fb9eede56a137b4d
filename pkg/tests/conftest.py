"""Shared pytest plumbing.

Acceptance tests (test_acceptance.py) tag themselves with a `_criterion`
label via the `criterion` decorator defined there.  This plugin collects
one PASS/FAIL line per labeled test and prints the block at the end of
the run, so the acceptance verdicts are readable at a glance even inside
a long -v listing.
"""

from __future__ import annotations

import pytest

_LINES: list[str] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    label = getattr(getattr(item, "function", None), "_criterion", None)
    if label is None or rep.when != "call":
        return
    _LINES.append(f"[ACCEPTANCE] {label}: {'PASS' if rep.passed else 'FAIL'}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _LINES:
        terminalreporter.write_line(line)
