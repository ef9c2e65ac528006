from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

_criterion_lines: list[str] = []


@pytest.fixture(scope="session")
def solved():
    """Memoizer for expensive solves shared across test files."""
    store: dict = {}

    def get(key, build):
        if key not in store:
            store[key] = build()
        return store[key]

    return get


@pytest.fixture(scope="session")
def criterion_report():
    """Collects one pass/fail line per acceptance criterion; printed in the
    terminal summary so the verdicts survive output capture."""

    def record(name: str, ok: bool, detail: str) -> bool:
        _criterion_lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)
