import warnings

import numpy as np
import pytest

from qhj_impulse.ensemble import SamplerParams, sample_microstate
from qhj_impulse.model import WellModel
from qhj_impulse.model import WideBandWarning


@pytest.fixture
def well():
    return WellModel()


def seeded_microstates(seed, count, require_monotone=True):
    rng = np.random.default_rng(seed)
    params = SamplerParams(require_monotone=require_monotone)
    return [sample_microstate(rng, params) for _ in range(count)]


@pytest.fixture(autouse=True)
def _quiet_wide_band():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WideBandWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
