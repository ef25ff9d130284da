import heapq
import random

from hypothesis import given

from synergy.baselines import (
    CountedSortedMultiset,
    merge_sort_counters,
    minimal_merge_sort,
    parallel_race,
    small_vs_small_sort,
)
from synergy.core import InstrumentedArray

from conftest import multisets


def reference_counter_merge_sort(values):
    """Independent count: top-down split at the midpoint, merging (value, count) lists."""
    count = 0

    def rec(xs):
        nonlocal count
        if len(xs) == 1:
            return [[xs[0], 1]]
        left, right = rec(xs[: len(xs) // 2]), rec(xs[len(xs) // 2:])
        out = []
        while left and right:
            count += 1
            if left[0][0] < right[0][0]:
                out.append(left.pop(0))
            elif left[0][0] > right[0][0]:
                out.append(right.pop(0))
            else:
                out.append([left[0][0], left.pop(0)[1] + right.pop(0)[1]])
        return out + left + right

    return (rec(list(values)) if values else []), count


def reference_minimal_merge_count(values):
    runs, cur = [], []
    for v in values:
        if cur and v < cur[-1]:
            runs.append(cur)
            cur = []
        cur.append(v)
    if cur:
        runs.append(cur)
    count = max(len(values) - 1, 0)
    heap = [(len(r), k, r) for k, r in enumerate(runs)]
    heapq.heapify(heap)
    stamp = len(heap)
    while len(heap) > 1:
        _, _, x = heapq.heappop(heap)
        _, _, y = heapq.heappop(heap)
        i = j = 0
        out = []
        while i < len(x) and j < len(y):
            count += 1
            if y[j] < x[i]:
                out.append(y[j])
                j += 1
            else:
                out.append(x[i])
                i += 1
        out += x[i:] + y[j:]
        heapq.heappush(heap, (len(out), stamp, out))
        stamp += 1
    return count


@given(multisets())
def test_merge_sort_counters(values):
    a = InstrumentedArray(values)
    got = merge_sort_counters(a)
    pairs, count = reference_counter_merge_sort(values)
    assert got.expand() == sorted(values)
    assert got.pairs == [tuple(p) for p in pairs]
    assert a.comparisons == count


@given(multisets())
def test_minimal_merge_sort(values):
    a = InstrumentedArray(values)
    assert minimal_merge_sort(a) == sorted(values)
    assert a.comparisons == reference_minimal_merge_count(values)


@given(multisets())
def test_small_vs_small_sort(values):
    a = InstrumentedArray(values)
    got = small_vs_small_sort(a)
    assert got.expand() == sorted(values)
    assert got.sigma == len(set(values))
    assert got == CountedSortedMultiset.from_sorted(sorted(values))


@given(multisets())
def test_parallel_race_costs_twice_the_winner(values):
    a = InstrumentedArray(values)
    res = parallel_race(a)
    assert res.output == sorted(values)
    c1 = InstrumentedArray(values)
    merge_sort_counters(c1)
    c2 = InstrumentedArray(values)
    minimal_merge_sort(c2)
    # the counter merge sort moves first, so it wins ties
    winner = "minimal_merge_sort" if c2.comparisons < c1.comparisons else "merge_sort_counters"
    assert res.winner == winner
    assert res.comparisons == 2 * min(c1.comparisons, c2.comparisons) == a.comparisons


def test_race_picks_counters_on_few_values():
    values = [1, 2] * 256
    assert parallel_race(InstrumentedArray(values)).winner == "merge_sort_counters"


def test_race_picks_minimal_merge_on_sorted_input():
    values = list(range(512))
    assert parallel_race(InstrumentedArray(values)).winner == "minimal_merge_sort"


def test_empty_and_single():
    for values in ([], [4]):
        assert merge_sort_counters(InstrumentedArray(values)).expand() == values
        assert minimal_merge_sort(InstrumentedArray(values)) == values
        assert small_vs_small_sort(InstrumentedArray(values)).expand() == values


def test_counted_multiset_from_sorted():
    m = CountedSortedMultiset.from_sorted([1, 1, 2, 5, 5, 5])
    assert m.pairs == [(1, 2), (2, 1), (5, 3)] and m.n == 6 and m.sigma == 3


def test_random_larger_inputs():
    rng = random.Random(11)
    for _ in range(20):
        values = [rng.randint(1, 30) for _ in range(rng.randint(100, 600))]
        assert small_vs_small_sort(InstrumentedArray(values)).expand() == sorted(values)
