"""Acceptance bookkeeping: tests tagged ``@pytest.mark.criterion(n)`` roll up
into one PASS/FAIL line per criterion in the terminal summary."""
from collections import defaultdict

import pytest

CRITERIA = {
    1: "gradient suite",
    2: "loss oracles",
    3: "overfit smoke test",
    4: "label geometry",
    5: "controller semantics",
    6: "weak filter",
    7: "metric equivalence",
    8: "attention localization",
}

_outcomes: dict[int, list[bool]] = defaultdict(list)
_known_gaps: set[int] = set()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    # setup errors and call failures both count against the criterion
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes[marker.args[0]].append(rep.passed)
        if hasattr(rep, "wasxfail") and not rep.passed:
            _known_gaps.add(marker.args[0])


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, name in CRITERIA.items():
        if n not in _outcomes:
            continue
        verdict = "PASS" if all(_outcomes[n]) else "FAIL"
        if n in _known_gaps:
            verdict += " (expected failure, marked xfail)"
        terminalreporter.write_line(f"criterion {n} ({name}): {verdict}")
