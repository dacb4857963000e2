import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dgendo.algebra import direct_sum_modules, regular_module  # noqa: E402
from dgendo.examples import (  # noqa: E402
    a2_algebra,
    a2_tilting_bimodule,
    example_dugas,
    truncated_polynomial,
    x_power_module,
)


@pytest.fixture(scope="session")
def k3():
    return truncated_polynomial(3)


@pytest.fixture(scope="session")
def k3_modules(k3):
    R = regular_module(k3)
    X1, X2 = x_power_module(k3, 1), x_power_module(k3, 2)
    return {"A": R, "X1": X1, "X2": X2,
            "AX1": direct_sum_modules([R, X1], "A+X1"), "AX2": direct_sum_modules([R, X2], "A+X2")}


@pytest.fixture(scope="session")
def dugas():
    return example_dugas(2, 2)


@pytest.fixture(scope="session")
def a2():
    return a2_algebra()


@pytest.fixture(scope="session")
def apr(a2):
    return a2_tilting_bimodule(a2)


_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion this test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n = mark.args[0]
    ok = rep.passed and not hasattr(rep, "wasxfail")
    if rep.when == "setup" and rep.passed:
        return
    _CRITERIA[n] = _CRITERIA.get(n, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if _CRITERIA[n] else 'FAIL'}")
