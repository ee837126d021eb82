"""Collects acceptance outcomes and prints one line per criterion after the run."""

ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for key, value in report.user_properties:
        if key == "criterion":
            ACCEPTANCE[value] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: int(s.split(":")[0])):
        terminalreporter.write_line(f"{'PASS' if ACCEPTANCE[label] else 'FAIL'}  criterion {label}")
