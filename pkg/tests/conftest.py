import time
from contextlib import contextmanager

import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def criterion(request):
    """Time a block, then record one PASS/FAIL line for the terminal summary."""
    lines = request.config.stash[_LINES]

    @contextmanager
    def run(number, title, budget_s):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            reason = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            lines.append(f"FAIL  criterion {number}: {title} ({elapsed:.2f}s) -- {reason}")
            raise
        elapsed = time.perf_counter() - start
        ok = elapsed < budget_s
        status = "PASS" if ok else "FAIL"
        lines.append(f"{status}  criterion {number}: {title} ({elapsed:.2f}s, budget {budget_s:g}s)")
        assert ok, f"took {elapsed:.2f}s, budget {budget_s}s"

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
