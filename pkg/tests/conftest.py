import numpy as np
import pytest

from qsm.builtins import BUILTINS, builtin, branching_table
from qsm.machine import random_deterministic_table, random_isometric_table

BUILTIN_NAMES = sorted(BUILTINS)
RANDOM_SEEDS = (11, 23, 37)


def random_isometric_tables():
    return [random_isometric_table(np.random.default_rng(s), n_labels=2, n_mixes=3)
            for s in RANDOM_SEEDS]


def machine_set():
    """The four builtins plus three seeded random isometric tables."""
    return [builtin(n) for n in BUILTIN_NAMES] + random_isometric_tables()


def mini_branching():
    """Prints P(P) then P on one branch and ~P(P) on the other, early enough for dense checks."""
    return branching_table("0P(P)0P", "0~P(P)", "mini-branching")


@pytest.fixture(params=BUILTIN_NAMES)
def any_builtin(request):
    return builtin(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_deterministic(seed, n_labels=3, mode="base"):
    return random_deterministic_table(np.random.default_rng(seed), n_labels, mode)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    from test_acceptance import CRITERIA

    outcomes = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            num = int(nodeid.split("test_criterion_")[1][:2])
            if key != "passed" or getattr(rep, "when", "call") == "call":
                if outcomes.get(num) != "FAIL":
                    outcomes[num] = "PASS" if key == "passed" else "FAIL"
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        if num in outcomes:
            terminalreporter.write_line(f"criterion {num:2d}: {outcomes[num]}  {CRITERIA[num]}")
