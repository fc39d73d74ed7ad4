import numpy as np
import pytest
from hypothesis import strategies as st

from tachyon_twin.kinematics import ModeLabel, boost


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def k15():
    """The m=1, k=(1.5,0,0) mode used throughout the worked examples."""
    return ModeLabel((1.5, 0.0, 0.0), 1.0)


unit_vectors = (
    st.tuples(*[st.floats(-1, 1) for _ in range(3)])
    .map(np.array)
    .filter(lambda v: np.linalg.norm(v) > 1e-3)
    .map(lambda v: v / np.linalg.norm(v))
)

speeds = st.floats(-0.99, 0.99)

boosts = st.builds(boost, unit_vectors, speeds)

tachyon_labels = st.builds(
    lambda n, size: ModeLabel(tuple(size * n), 1.0),
    unit_vectors,
    st.floats(1.05, 10.0),
)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
