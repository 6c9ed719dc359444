import sys
import numpy as np
import pytest
from hypothesis import strategies as st

from cvm2d.lattice import Grid


def row_alternating(rows=4, cols=4):
    return Grid(rows, cols, tuple(1 - (r % 2) for r in range(rows) for _ in range(cols)))


def uniform(rows, cols, state):
    return Grid(rows, cols, (state,) * (rows * cols))


@st.composite
def grids(draw, max_rows=10, max_cols=10):
    rows = draw(st.sampled_from([r for r in range(4, max_rows + 1, 2)]))
    cols = draw(st.integers(4, max_cols))
    cells = draw(st.lists(st.integers(0, 1), min_size=rows * cols, max_size=rows * cols))
    return Grid(rows, cols, tuple(cells))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
