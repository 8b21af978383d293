import time

import pytest

from misowild.optimizer import RunConfig, run
from misowild.problems import forrester_pair

SEEDS = range(10)
_ACCEPTANCE: list[tuple[str, bool, str]] = []


def report(criterion: str, passed: bool, detail: str = "") -> None:
    _ACCEPTANCE.append((criterion, bool(passed), detail))


def _sweep(algorithm):
    start = time.perf_counter()
    runs = [run(forrester_pair(), RunConfig(algorithm=algorithm, seed=s)) for s in SEEDS]
    return runs, time.perf_counter() - start


@pytest.fixture(scope="session")
def miso_wild_sweep():
    """Ten default forrester2 runs of miso-wild and their wall time."""
    return _sweep("miso-wild")


@pytest.fixture(scope="session")
def ei_cool_sweep():
    return _sweep("ei-cool")


@pytest.fixture(scope="session")
def miso_wild_runs(miso_wild_sweep):
    return miso_wild_sweep[0]


@pytest.fixture(scope="session")
def ei_cool_runs(ei_cool_sweep):
    return ei_cool_sweep[0]


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(_ACCEPTANCE, key=lambda r: int(r[0].split()[0])):
        line = f"{'PASS' if passed else 'FAIL'}  {criterion}"
        terminalreporter.write_line(f"{line}  ({detail})" if detail else line)
