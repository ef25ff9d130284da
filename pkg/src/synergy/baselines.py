"""Prior-art multiset sorters used as comparison-counted reference points."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .core import InstrumentedArray, detect_runs


@dataclass
class CountedSortedMultiset:
    """Distinct values in ascending order, each with its multiplicity."""

    pairs: List[Tuple[object, int]]

    @property
    def sigma(self) -> int:
        return len(self.pairs)

    @property
    def n(self) -> int:
        return sum(m for _, m in self.pairs)

    def expand(self) -> list:
        out = []
        for v, m in self.pairs:
            out.extend([v] * m)
        return out

    @classmethod
    def from_sorted(cls, seq) -> "CountedSortedMultiset":
        """Collapse an already sorted sequence (uncounted; for oracles and post-passes)."""
        pairs: List[Tuple[object, int]] = []
        for v in seq:
            if pairs and pairs[-1][0] == v:
                pairs[-1] = (v, pairs[-1][1] + 1)
            else:
                pairs.append((v, 1))
        return cls(pairs)


def _merge_counted(x, y, cmp):
    out = []
    i = j = 0
    lx, ly = len(x), len(y)
    while i < lx and j < ly:
        c = cmp(x[i][0], y[j][0])
        if c < 0:
            out.append(x[i])
            i += 1
        elif c > 0:
            out.append(y[j])
            j += 1
        else:
            out.append((x[i][0], x[i][1] + y[j][1]))
            i += 1
            j += 1
    if i < lx:
        out.extend(x[i:])
    if j < ly:
        out.extend(y[j:])
    return out


def _merge(x, y, cmp):
    out = []
    i = j = 0
    lx, ly = len(x), len(y)
    while i < lx and j < ly:
        if cmp(y[j], x[i]) < 0:
            out.append(y[j])
            j += 1
        else:
            out.append(x[i])
            i += 1
    if i < lx:
        out.extend(x[i:])
    if j < ly:
        out.extend(y[j:])
    return out


def merge_sort_counters(a: InstrumentedArray) -> CountedSortedMultiset:
    """Top-down merge sort that keeps one copy per value plus a counter."""
    vals = a.values
    cmp = a.cmp

    def rec(lo, hi):
        if hi - lo == 1:
            return [(vals[lo], 1)]
        mid = (lo + hi) >> 1
        return _merge_counted(rec(lo, mid), rec(mid, hi), cmp)

    return CountedSortedMultiset(rec(0, len(vals)) if vals else [])


def _huffman_merge(pieces, merge, cmp):
    # Heap entries are (current size, creation order, list); sizes and
    # creation stamps are bookkeeping, not key comparisons.
    heap = [(len(p), k, p) for k, p in enumerate(pieces)]
    heapq.heapify(heap)
    stamp = len(heap)
    while len(heap) > 1:
        _, _, x = heapq.heappop(heap)
        _, _, y = heapq.heappop(heap)
        z = merge(x, y, cmp)
        heapq.heappush(heap, (len(z), stamp, z))
        stamp += 1
    return heap[0][2] if heap else []


def minimal_merge_sort(a: InstrumentedArray) -> list:
    """Detect runs, then repeatedly merge the two shortest ones."""
    vals = a.values
    runs = detect_runs(a)
    pieces = [vals[s:s + z] for s, z in zip(runs.starts, runs.sizes)]
    return _huffman_merge(pieces, _merge, a.cmp)


def small_vs_small_sort(a: InstrumentedArray) -> CountedSortedMultiset:
    """Runs with counters, merged shortest-first by their collapsed sizes."""
    vals = a.values
    n = len(vals)
    if n == 0:
        return CountedSortedMultiset([])
    cmp = a.cmp
    pieces = []
    cur = [(vals[0], 1)]
    for i in range(1, n):
        c = cmp(vals[i - 1], vals[i])
        if c > 0:
            pieces.append(cur)
            cur = [(vals[i], 1)]
        elif c == 0:
            cur[-1] = (vals[i], cur[-1][1] + 1)
        else:
            cur.append((vals[i], 1))
    pieces.append(cur)
    return CountedSortedMultiset(_huffman_merge(pieces, _merge_counted, cmp))


class _OutOfBudget(Exception):
    pass


class _BudgetArray(InstrumentedArray):
    __slots__ = ("budget",)

    def __init__(self, values, budget):
        super().__init__(values)
        self.budget = budget

    def cmp(self, x, y):
        if self.comparisons >= self.budget:
            raise _OutOfBudget
        self.comparisons += 1
        return (x > y) - (x < y)


@dataclass
class RaceResult:
    winner: str
    output: list
    comparisons: int
    counts: Dict[str, int] = field(default_factory=dict)


def _attempt(fn, values, budget):
    b = _BudgetArray(values, budget)
    try:
        out = fn(b)
    except _OutOfBudget:
        return None, budget
    return out, b.comparisons


def parallel_race(a: InstrumentedArray) -> RaceResult:
    """Run the counter merge sort and the minimal merge sort in lockstep.

    The two contenders alternate one comparison at a time (counter merge
    sort first) on private copies; the first to finish wins and the
    reported cost is twice the winner's count. Lockstep is simulated
    exactly by re-running each contender under a doubling comparison
    budget, so the loser never does more work than the winner allows.
    """
    vals = a.values
    first, second = ("merge_sort_counters", merge_sort_counters), ("minimal_merge_sort", minimal_merge_sort)
    budget = max(1, len(vals))
    while True:
        out1, c1 = _attempt(first[1], vals, budget)
        if out1 is not None:
            # the second contender wins only by finishing strictly earlier
            out2, c2 = _attempt(second[1], vals, c1 - 1) if c1 > 0 else (None, 0)
            if out2 is not None:
                winner, output, cw, counts = second[0], out2, c2, {first[0]: c2, second[0]: c2}
            else:
                winner, output, cw, counts = first[0], out1, c1, {first[0]: c1, second[0]: max(c1 - 1, 0)}
            break
        out2, c2 = _attempt(second[1], vals, budget)
        if out2 is not None:
            winner, output, cw, counts = second[0], out2, c2, {first[0]: c2, second[0]: c2}
            break
        budget *= 2
    if isinstance(output, CountedSortedMultiset):
        output = output.expand()
    a.comparisons += 2 * cw
    return RaceResult(winner, output, 2 * cw, counts)
