import time

import pytest

_LINES = {}


class Criterion:
    def __init__(self, number, title, limit_s):
        self.number, self.title, self.limit_s = number, title, limit_s
        self.start = time.perf_counter()

    def verdict(self, passed: bool, detail: str) -> bool:
        elapsed = time.perf_counter() - self.start
        in_time = elapsed < self.limit_s
        ok = bool(passed) and in_time
        line = (f"criterion {self.number:2d} {'PASS' if ok else 'FAIL'}  {self.title}: {detail}"
                f" [{elapsed:.1f} s, limit {self.limit_s:g} s]")
        _LINES[self.number] = line
        print("\n" + line)
        return ok


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_LINES):
            terminalreporter.write_line(_LINES[k])
