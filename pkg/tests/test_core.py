import math

import pytest
from hypothesis import given, strategies as st

from synergy.core import (
    InstrumentedArray,
    Window,
    detect_pivot_positions,
    detect_runs,
    doubling_search,
    doubling_search_bidir,
    median_of_middles,
    middle_of,
    select_with_relations,
    split_by_pivot_positions,
    tie_bounds,
)

from conftest import multisets


def test_cmp_counts_one_per_call():
    a = InstrumentedArray([3, 1])
    assert a.cmp(3, 1) == 1 and a.cmp(1, 3) == -1 and a.cmp(2, 2) == 0
    assert a.comparisons == 3
    assert a.fresh().comparisons == 0


def test_micro_runs(micro):
    a = InstrumentedArray(micro)
    runs = detect_runs(a)
    assert runs.rho == 3
    assert [micro[s:s + z] for s, z in zip(runs.starts, runs.sizes)] == [[2, 3], [1, 3, 7, 8, 9], [4, 5, 6]]
    assert a.comparisons == len(micro) - 1


def test_micro_pivot_positions(micro):
    # max(2, 3, 1) = 3 <= min(3, 7, ...) = 3, so position 3 qualifies as well as 4
    p = detect_pivot_positions(InstrumentedArray(micro))
    assert p.positions == [3, 4]
    assert split_by_pivot_positions(InstrumentedArray(micro), p) == [(0, 3), (3, 4), (4, 10)]


@pytest.mark.parametrize("values", [[], [5], [1, 2, 3], [3, 2, 1], [2, 2, 2]])
def test_runs_edge_cases(values):
    runs = detect_runs(InstrumentedArray(values))
    assert sum(runs.sizes) == len(values)
    assert runs.rho == (0 if not values else 1 + sum(x > y for x, y in zip(values, values[1:])))


@given(multisets())
def test_runs_are_maximal_and_ties_exact(values):
    a = InstrumentedArray(values)
    runs = detect_runs(a)
    assert a.comparisons == max(len(values) - 1, 0)
    for s, z in zip(runs.starts, runs.sizes):
        assert values[s:s + z] == sorted(values[s:s + z])
        if s:
            assert values[s - 1] > values[s]
    assert list(runs.ties) == [int(i > 0 and values[i] == values[i - 1]) for i in range(len(values))]


@given(multisets())
def test_pivot_positions_match_definition(values):
    a = InstrumentedArray(values)
    p = detect_pivot_positions(a)
    expected = [i for i in range(1, len(values)) if max(values[:i]) <= min(values[i:])]
    assert p.positions == expected
    assert a.comparisons <= 3 * max(len(values) - 1, 0)


@given(st.lists(st.integers(0, 20), min_size=0, max_size=80).map(sorted), st.integers(-1, 21),
       st.sampled_from(["geq", "gt"]), st.sampled_from(["left", "right", "mid"]))
def test_doubling_search_matches_bisect(window, v, mode, anchor):
    import bisect
    a = InstrumentedArray(window)
    n = len(window)
    if anchor == "mid":
        if not n:
            return
        anchor = n // 2
    got = doubling_search(a, 0, n, v, mode, anchor)
    assert got == (bisect.bisect_left if mode == "geq" else bisect.bisect_right)(window, v)
    assert a.comparisons <= 2 * math.ceil(math.log2(n + 2)) + 2


@given(st.lists(st.integers(0, 20), max_size=80).map(sorted), st.integers(-1, 21))
def test_bidirectional_search_is_equal_range(window, v):
    import bisect
    a = InstrumentedArray(window)
    assert doubling_search_bidir(a, 0, len(window), v) == (bisect.bisect_left(window, v),
                                                          bisect.bisect_right(window, v))


def test_doubling_search_rejects_bad_mode():
    with pytest.raises(ValueError):
        doubling_search(InstrumentedArray([1, 2]), 0, 2, 1, "lt")


@given(st.lists(st.integers(0, 30), min_size=1, max_size=1500), st.data())
def test_select_with_relations(keys, data):
    k = data.draw(st.integers(0, len(keys) - 1))
    a = InstrumentedArray(keys)
    j, rel = select_with_relations(keys, k, a.cmp)
    order = sorted(range(len(keys)), key=lambda i: (keys[i], i))
    assert keys[j] == keys[order[k]]
    assert rel == [(x > keys[j]) - (x < keys[j]) for x in keys]


def test_select_rejects_out_of_range():
    with pytest.raises(IndexError):
        select_with_relations([1, 2], 2, InstrumentedArray().cmp)


def test_select_is_linear_on_large_inputs():
    import random
    rng = random.Random(5)
    keys = rng.sample(range(10 ** 6), 20000)
    a = InstrumentedArray(keys)
    select_with_relations(keys, len(keys) // 2, a.cmp)
    assert a.comparisons <= 3 * len(keys)


def test_middle_offset():
    assert [middle_of(0, m) for m in range(1, 6)] == [0, 0, 1, 1, 2]


def test_median_of_middles_is_lower_median():
    vals = [1, 5, 9, 2, 3, 4, 7, 8, 10]
    a = InstrumentedArray(vals)
    windows = [Window(0, 0, 3), Window(1, 3, 6), Window(2, 6, 9)]
    mm = median_of_middles(a, windows)
    assert (mm.mu, mm.owner, mm.pos) == (5, 0, 1)
    assert mm.relations == [0, -1, 1]
    with pytest.raises(ValueError):
        median_of_middles(a, [])


def test_tie_bounds():
    ties = bytearray([0, 0, 1, 1, 0, 1])
    assert tie_bounds(ties, 2, 0, 6) == (1, 4)
    assert tie_bounds(ties, 3, 2, 6) == (2, 4)
    assert tie_bounds(ties, 4, 0, 6) == (4, 6)
