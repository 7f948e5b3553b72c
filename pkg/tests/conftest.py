import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[int, str] = {}


class CriterionRecorder:
    """Collects named checks for one acceptance criterion and reports a verdict line."""

    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.failures: list[str] = []
        self.count = 0

    def check(self, ok: bool, detail: str) -> None:
        self.count += 1
        if not ok:
            self.failures.append(detail)

    def finish(self) -> None:
        verdict = "PASS" if not self.failures else "FAIL"
        line = f"[{verdict}] criterion {self.number:2d}: {self.title} ({self.count - len(self.failures)}/{self.count} checks)"
        if self.failures:
            line += "\n" + "\n".join(f"         - {f}" for f in self.failures)
        _CRITERIA[self.number] = line
        print(line)
        assert not self.failures, "; ".join(self.failures)


@pytest.fixture
def criterion():
    return CriterionRecorder


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
