"""Shared pytest wiring: collect acceptance verdict lines for the summary."""

_CRITERION_LINES: list[str] = []


def record_criterion(line: str) -> None:
    """Store one verdict line for the end-of-run acceptance summary."""
    _CRITERION_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_LINES:
        return
    terminalreporter.write_sep("=", "acceptance summary")
    for line in sorted(_CRITERION_LINES):
        terminalreporter.write_line(line)
