"""Shared test fixtures and the acceptance-summary report."""

import re

import pytest

_ACCEPTANCE_RE = re.compile(r"test_criterion_(\d+)_(\w+)")
_acceptance_outcomes = {}
_acceptance_details = []


@pytest.fixture
def acceptance_report():
    """Collect lines to print under the acceptance summary (per-seed numbers etc.)."""
    return _acceptance_details.append


def pytest_runtest_logreport(report):
    match = _ACCEPTANCE_RE.search(report.nodeid)
    if match is None:
        return
    key = (int(match.group(1)), match.group(2))
    if report.when == "call":
        _acceptance_outcomes[key] = report.outcome
    elif report.when == "setup" and report.outcome != "passed":
        _acceptance_outcomes[key] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    outcome_word = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}
    for (number, slug), outcome in sorted(_acceptance_outcomes.items()):
        label = slug.replace("_", " ")
        word = outcome_word.get(outcome, outcome.upper())
        terminalreporter.write_line(f"criterion {number} ({label}): {word}")
    for line in _acceptance_details:
        terminalreporter.write_line(line)
