import pytest

CRITERIA = 11
_LINES = pytest.StashKey[dict]()


@pytest.fixture
def report(request):
    """Record the one-line verdict of an acceptance criterion."""
    lines = request.config.stash.setdefault(_LINES, {})

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}"
        lines[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, CRITERIA + 1):
        terminalreporter.write_line(lines.get(n, f"FAIL criterion {n:2d}: not run or errored"))
