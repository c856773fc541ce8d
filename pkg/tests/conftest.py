"""Shared test plumbing.

The acceptance tests announce a verdict line per criterion. Pytest captures
file descriptors by default, so those lines are pushed through the capture
manager to stay visible live, and replayed in a summary section at the end
of the run.
"""

import pytest

_criterion_lines: list[str] = []


@pytest.fixture(scope="session")
def criterion_log(request):
    """Return a print function whose output survives output capture."""
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def log(line: str, record: bool = False) -> None:
        if record:
            _criterion_lines.append(line)
        if capman is not None:
            with capman.global_and_fixture_disabled():
                print(line, flush=True)
        else:
            print(line, flush=True)

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)
