import pytest

_LINES_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_line(request):
    """Record one pass/fail summary line per acceptance criterion.

    The line is printed immediately (visible with ``-s``) and repeated in the
    terminal summary so it shows in every run.
    """
    lines = request.config.stash.setdefault(_LINES_KEY, [])

    def record(criterion, passed, detail):
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}"
        print(line)
        lines.append(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
