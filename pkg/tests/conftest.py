"""Shared pytest hooks.

Acceptance tests append one line per criterion to ``ACCEPTANCE_LINES``; the
terminal summary prints them in criterion order so they survive output
capture.
"""

ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
