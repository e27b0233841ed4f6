import re

import numpy as np
import pytest

_criteria = {}
_titles = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = re.search(r"test_criterion_(\d+)_", item.name)
        if m and item.function.__doc__:
            _titles[int(m.group(1))] = item.function.__doc__.strip().splitlines()[0]


def pytest_runtest_logreport(report):
    # supplementary tests such as test_criterion_02b_ count toward criterion 2
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)[a-z]?_", report.nodeid)
    if not m:
        return
    key = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        if _criteria.get(key, "passed") == "passed":
            _criteria[key] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        status = "PASS" if _criteria[key] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {key:2d}: {status}  {_titles.get(key, '')}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
