import math

import pytest

from antsweep import engine

# Every dynamic run finished anywhere in the session lands here, so the
# area-recursion criterion can be judged over the whole suite.
DYNAMIC_RUNS: list[tuple[int, int, int, int]] = []  # (S0, d, checks, violations)
CRITERIA: dict[int, tuple[bool, str]] = {}

_original_result = engine.Simulation.result


def _recording_result(self):
    res = _original_result(self)
    if not math.isinf(self.d):
        rep = res.bound_report
        DYNAMIC_RUNS.append((self.S0, int(self.d), rep.area_checks, rep.area_violations))
    return res


engine.Simulation.result = _recording_result


def pytest_collection_modifyitems(session, config, items):
    # acceptance criteria run last so the dynamic-run registry is complete
    items.sort(key=lambda it: it.nodeid.startswith("tests/test_acceptance.py"))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, msg = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {msg}")


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion and print it."""

    def record(n: int, ok: bool, msg: str) -> None:
        CRITERIA[n] = (ok, msg)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {msg}")

    return record
