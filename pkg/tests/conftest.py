from __future__ import annotations

import pytest

from vsl.betti import Engine
from vsl.linalg import FieldSpec, PINNED_PRIMES


@pytest.fixture(scope="session")
def eng() -> Engine:
    """Shared engine at the first pinned prime; block ranks accumulate."""
    return Engine(FieldSpec.prime(PINNED_PRIMES[0]))


@pytest.fixture(scope="session")
def eng2() -> Engine:
    """Independent engine at the second pinned prime for agreement checks."""
    return Engine(FieldSpec.prime(PINNED_PRIMES[1]))


# One pass/fail line per acceptance criterion, echoed at the end of the run.
ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] acceptance criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
