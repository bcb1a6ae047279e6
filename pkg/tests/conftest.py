import numpy as np
import pytest

from sun_coherence import build_generators, structure_constants

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def su2():
    gens = build_generators(2)
    return gens, structure_constants(gens)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


SUITE_BUDGET_S = 60.0
_session = {}


def pytest_sessionstart(session):
    import time

    _session["start"] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    import time

    if not ACCEPTANCE_LINES:
        return
    elapsed = time.perf_counter() - _session["start"]
    ok = elapsed < SUITE_BUDGET_S
    ACCEPTANCE_LINES.append(
        f"{'PASS' if ok else 'FAIL'}  criterion 9 (runtime): full suite {elapsed:.1f} s (< {SUITE_BUDGET_S:.0f} s)"
    )
    if not ok:
        session.exitstatus = 1
