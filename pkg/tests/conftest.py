import os
from pathlib import Path

import numpy as np
import pytest

from effortnet.cocomo import COST_DRIVER_TABLE, DRIVERS, DevelopmentMode, Level, effort
from effortnet.dataset import Dataset, ProjectRecord, load_dataset

DATA_DIR = Path(__file__).parent / "data"


def synthetic_projects(seed=7, counts=(23, 12, 28), noise=0.3) -> Dataset:
    """63 invented projects shaped like COCOMO81 (mode mix, table multipliers, wide sizes).

    Actual effort is organic/semidetached/embedded COCOMO times log-normal
    noise. Not real data; used to exercise the pipeline at full size.
    """
    rng = np.random.default_rng(seed)
    modes = [m for m, c in zip(DevelopmentMode, counts) for _ in range(c)]
    records = []
    for pid, mode in enumerate(modes, start=1):
        mult = []
        for d in DRIVERS:
            cells = COST_DRIVER_TABLE[d]
            levels = list(cells)
            w = np.array([3.0 if lv is Level.NOMINAL else 1.0 for lv in levels])
            mult.append(cells[levels[rng.choice(len(levels), p=w / w.sum())]])
        size = round(float(np.exp(rng.uniform(np.log(2), np.log(1150)))), 2)
        actual = effort(mode, size, float(np.prod(mult))) * float(np.exp(rng.normal(0, noise)))
        records.append(ProjectRecord(pid, mode, tuple(mult), size, round(actual, 1)))
    return Dataset(tuple(records), provenance="synthetic COCOMO81-shaped test data")


def cocomo81_path():
    """Location of the real 63-project COCOMO81 CSV, if one has been supplied."""
    env = os.environ.get("COCOMO81_CSV")
    if env:
        return Path(env)
    candidate = DATA_DIR / "cocomo81.csv"
    return candidate if candidate.exists() else None


@pytest.fixture(scope="session")
def synthetic():
    return synthetic_projects()


@pytest.fixture(scope="session")
def cocomo81():
    path = cocomo81_path()
    if path is None:
        pytest.fail(
            "COCOMO81 data not available: set COCOMO81_CSV or add tests/data/cocomo81.csv "
            "(columns: id,mode,rely,...,sced,kdsi,actual)"
        )
    ds = load_dataset(path)
    assert len(ds) == 63, f"expected the 63-project COCOMO81 set, got {len(ds)} rows"
    return ds


# --- acceptance summary -------------------------------------------------------

_acceptance_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion checked by this test")


def pytest_runtest_logreport(report):
    marker = getattr(report, "_acceptance", None)
    if marker is None:
        return
    if report.when == "call" or report.outcome != "passed":
        number, title = marker
        previous = _acceptance_results.get(number, (title, "PASS"))[1]
        outcome = "PASS" if report.outcome == "passed" and previous == "PASS" else "FAIL"
        _acceptance_results[number] = (title, outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result()._acceptance = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance_results):
        title, outcome = _acceptance_results[number]
        terminalreporter.write_line(f"criterion {number}: {outcome}  {title}")
