import random

import pytest
from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")

MICRO = [2, 3, 1, 3, 7, 8, 9, 4, 5, 6]


def multisets(max_size=60, max_value=None):
    """Lists of small integers; a small value range forces repeated values."""
    return st.integers(1, 12).flatmap(
        lambda top: st.lists(st.integers(1, max_value or top), max_size=max_size)
    )


def run_shaped(rng: random.Random, n: int, sigma: int, rho: int):
    """Concatenation of ``rho`` sorted chunks of values from ``[1, sigma]``."""
    vals = [rng.randint(1, sigma) for _ in range(n)]
    edges = sorted({0, n, *rng.sample(range(n + 1), min(n + 1, rho - 1))}) if n else [0]
    return [v for a, b in zip(edges, edges[1:]) for v in sorted(vals[a:b])]


@pytest.fixture
def micro():
    return list(MICRO)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
