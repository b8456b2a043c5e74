"""Shared test plumbing: a registry for acceptance-criterion result
lines, re-emitted in the terminal summary so every run shows one
pass/fail line per criterion."""

CRITERION_LINES: list[str] = []


def record_criterion(line: str) -> None:
    CRITERION_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
