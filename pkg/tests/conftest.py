ACCEPTANCE_LINES = []


def record(number: int, passed: bool, text: str) -> str:
    line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {text}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
