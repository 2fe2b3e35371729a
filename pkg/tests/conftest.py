from pathlib import Path

import numpy as np
import pytest

from gaussmarkov import Dataset, brownian

DATA_DIR = Path(__file__).parent / "data"

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def standard_bm():
    return brownian(0.0, 0.0, 0.0, 1.0)


@pytest.fixture
def doubling_data():
    xs = 2.0 ** np.arange(4)
    return Dataset.iid(xs, [0.3, -1.0, 2.0, 1.5], 1.0)
