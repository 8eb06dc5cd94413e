import sys

import numpy as np
import pytest

from evoscheme import Objective, RngStream, SearchSpace


def neg_sphere(x):
    return -float(np.sum(np.asarray(x) ** 2))


@pytest.fixture
def sphere_obj():
    return Objective(neg_sphere, name="sphere")


@pytest.fixture
def unit_square():
    return SearchSpace.uniform(2, 0.0, 1.0)


@pytest.fixture
def rng():
    return RngStream(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
