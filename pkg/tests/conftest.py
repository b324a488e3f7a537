import numpy as np
import pytest
from hypothesis import settings

from ballistic.counting import rank_rows

# fixed example streams keep the suite reproducible run to run
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


def random_points(rng, n, dim=None, ties=False):
    """Gaussian points; with ``ties`` about half the rows repeat earlier ones."""
    dim = dim or int(rng.integers(1, 4))
    x = rng.normal(size=(n, dim))
    if ties and n > 1:
        dup = rng.random(n) < 0.5
        dup[0] = False
        src = rng.integers(0, np.maximum(np.arange(n), 1))
        x[dup] = x[src[dup]]
    return x


def random_sizes(rng, n, k):
    cut = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False))
    return np.diff(np.r_[0, cut, n])


def materialized_ranks(d, lab, s, t):
    """Rank matrices of groups s, t and their union by slicing and re-ranking."""
    a = np.flatnonzero(lab == s)
    b = np.flatnonzero(lab == t)
    ab = np.r_[a, b]
    return tuple(rank_rows(d[np.ix_(i, i)])[0] for i in (a, b, ab))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
