import warnings

import numpy as np
import pytest
from hypothesis import strategies as st

warnings.filterwarnings("ignore", message="The TBB threading layer")

from macjsc import make_joint  # noqa: E402


@st.composite
def tables(draw, n_vars=3, max_size=3, zeros=True):
    """Random normalized table with ``n_vars`` axes; some cells may be zero."""
    sizes = [draw(st.integers(1, max_size)) for _ in range(n_vars)]
    n = int(np.prod(sizes))
    cells = draw(st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=n, max_size=n))
    a = np.asarray(cells, dtype=float)
    if zeros:
        mask = draw(st.lists(st.booleans(), min_size=n, max_size=n))
        a = np.where(mask, a, 0.0)
    if a.sum() <= 1e-6:
        a = np.ones(n)
    return (a / a.sum()).reshape(sizes)


@st.composite
def joints(draw, names=("A", "B", "C"), max_size=3):
    t = draw(tables(len(names), max_size))
    return make_joint(list(zip(names, t.shape)), t)


@st.composite
def kernel_tables(draw, in_sizes, out_size):
    n = int(np.prod(in_sizes)) * out_size
    cells = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    a = np.asarray(cells).reshape(tuple(in_sizes) + (out_size,))
    return a / a.sum(-1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
