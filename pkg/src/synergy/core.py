"""Primitives shared by every sorter and query structure in the package.

All positions are 0-based and all windows are half-open ``[lo, hi)``.
Key comparisons go through :meth:`InstrumentedArray.cmp`, a three-way
comparison that bumps the array's counter by exactly one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, NamedTuple, Sequence, Tuple


class InstrumentedArray:
    """A read-only multiset in input order with a comparison counter."""

    __slots__ = ("values", "comparisons")

    def __init__(self, values: Iterable = ()):
        self.values = list(values)
        self.comparisons = 0

    def cmp(self, x, y) -> int:
        self.comparisons += 1
        return (x > y) - (x < y)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def __repr__(self) -> str:
        return f"InstrumentedArray(n={len(self.values)}, comparisons={self.comparisons})"

    def fresh(self) -> "InstrumentedArray":
        """Same values, counter reset."""
        return InstrumentedArray(self.values)


class Window(NamedTuple):
    """The unresolved part ``values[lo:hi]`` of run ``run``."""

    run: int
    lo: int
    hi: int


@dataclass
class RunDecomposition:
    starts: List[int]
    sizes: List[int]
    # ties[i] == 1 iff values[i] == values[i-1] inside a run (free by-product
    # of the three-way scan).
    ties: bytearray = field(default_factory=bytearray, repr=False)

    @property
    def rho(self) -> int:
        return len(self.starts)

    def windows(self) -> List[Window]:
        return [Window(r, s, s + z) for r, (s, z) in enumerate(zip(self.starts, self.sizes))]

    def run_of(self) -> List[int]:
        """Run id of every position."""
        out = []
        for r, z in enumerate(self.sizes):
            out.extend([r] * z)
        return out


@dataclass
class PivotPositions:
    """Positions ``p`` in ``[1, n-1]`` with ``max(values[:p]) <= min(values[p:])``."""

    positions: List[int]
    n: int

    @property
    def phi(self) -> int:
        return len(self.positions)


def detect_runs(a: InstrumentedArray) -> RunDecomposition:
    """Maximal non-decreasing runs, left to right, in ``max(n-1, 0)`` comparisons."""
    vals = a.values
    n = len(vals)
    ties = bytearray(n)
    if n == 0:
        return RunDecomposition([], [], ties)
    starts = [0]
    cmp = a.cmp
    prev = vals[0]
    for i in range(1, n):
        cur = vals[i]
        c = cmp(prev, cur)
        if c > 0:
            starts.append(i)
        elif c == 0:
            ties[i] = 1
        prev = cur
    sizes = [e - s for s, e in zip(starts, starts[1:] + [n])]
    return RunDecomposition(starts, sizes, ties)


def pivot_sweeps(a: InstrumentedArray) -> Tuple[List[int], list, list]:
    """Pivot positions plus the prefix-maximum and suffix-minimum sweeps.

    Uses at most ``3(n-1)`` comparisons. The sweeps are returned because the
    deferred structures reuse them as value bounds of each sub-instance.
    """
    vals = a.values
    n = len(vals)
    if n <= 1:
        return [], list(vals), list(vals)
    cmp = a.cmp
    pmax = [vals[0]] * n
    for i in range(1, n):
        v = vals[i]
        pmax[i] = v if cmp(v, pmax[i - 1]) > 0 else pmax[i - 1]
    smin = [vals[-1]] * n
    for i in range(n - 2, -1, -1):
        v = vals[i]
        smin[i] = v if cmp(v, smin[i + 1]) < 0 else smin[i + 1]
    positions = [p for p in range(1, n) if cmp(pmax[p - 1], smin[p]) <= 0]
    return positions, pmax, smin


def detect_pivot_positions(a: InstrumentedArray) -> PivotPositions:
    return PivotPositions(pivot_sweeps(a)[0], len(a))


def split_by_pivot_positions(a: InstrumentedArray, p: PivotPositions) -> List[Tuple[int, int]]:
    """The ``phi + 1`` sub-instance windows cut at the pivot positions."""
    n = len(a)
    if n == 0:
        return []
    cuts = [0] + list(p.positions) + [n]
    return list(zip(cuts, cuts[1:]))


# -- doubling searches -------------------------------------------------------
#
# The gallops are generators that yield once per probe, so that two of them
# can be advanced in strict alternation. Probes share a per-search cache of
# three-way outcomes, so no index is ever compared against the target twice.


def _prober(a: InstrumentedArray, v) -> Callable[[int], int]:
    vals = a.values
    cmp = a.cmp
    cache = {}

    def probe(i):
        c = cache.get(i)
        if c is None:
            c = cache[i] = cmp(vals[i], v)
        return c

    return probe


def _gallop_forward(probe, start, hi, strict):
    """First ``i`` in ``[start, hi)`` with ``a[i] >= v`` (``> v`` if strict), else hi."""
    bound = 0 if strict else -1
    fail = start - 1
    step = 1
    while True:
        i = start + step - 1
        if i >= hi:
            i = hi - 1
            if i <= fail:
                return hi
            c = probe(i)
            yield
            if c <= bound:
                return hi
            break
        c = probe(i)
        yield
        if c > bound:
            break
        fail = i
        step <<= 1
    lo, top = fail + 1, i
    while lo < top:
        mid = (lo + top) >> 1
        c = probe(mid)
        yield
        if c > bound:
            top = mid
        else:
            lo = mid + 1
    return lo


def _gallop_backward(probe, lo, end, strict):
    """Same answer as :func:`_gallop_forward` on ``[lo, end)``, probing from the right."""
    bound = 0 if strict else -1
    ok = end
    step = 1
    while True:
        i = end - step
        if i < lo:
            i = lo
            if i >= ok:
                return ok
            c = probe(i)
            yield
            if c > bound:
                return lo
            break
        c = probe(i)
        yield
        if c <= bound:
            break
        ok = i
        step <<= 1
    low, top = i + 1, ok
    while low < top:
        mid = (low + top) >> 1
        c = probe(mid)
        yield
        if c > bound:
            top = mid
        else:
            low = mid + 1
    return low


def _finish(gen):
    try:
        while True:
            next(gen)
    except StopIteration as stop:
        return stop.value


def _race(*gens):
    """Advance the generators round-robin; return (index, result) of the first to finish."""
    while True:
        for k, g in enumerate(gens):
            try:
                next(g)
            except StopIteration as stop:
                return k, stop.value


def doubling_search(a: InstrumentedArray, lo: int, hi: int, v, mode: str = "geq", anchor="left") -> int:
    """Boundary of ``v`` in the sorted window ``values[lo:hi]``.

    ``mode`` is ``"geq"`` (first element ``>= v``) or ``"gt"`` (first element
    ``> v``); the result is ``hi`` when no element qualifies. ``anchor`` is
    ``"left"``, ``"right"`` or an index inside the window where the gallop
    starts. Costs at most ``2*ceil(log2(d+2)) + 2`` comparisons, ``d`` being
    the distance from the anchor to the answer.
    """
    if mode not in ("geq", "gt"):
        raise ValueError(f"unknown mode {mode!r}")
    strict = mode == "gt"
    if lo >= hi:
        return lo
    probe = _prober(a, v)
    if anchor == "left":
        return _finish(_gallop_forward(probe, lo, hi, strict))
    if anchor == "right":
        return _finish(_gallop_backward(probe, lo, hi, strict))
    p = int(anchor)
    if not lo <= p < hi:
        raise ValueError(f"anchor {p} outside window [{lo}, {hi})")
    c = probe(p)
    if c > (0 if strict else -1):
        return _finish(_gallop_backward(probe, lo, p, strict))
    return _finish(_gallop_forward(probe, p + 1, hi, strict))


def doubling_search_bidir(a: InstrumentedArray, lo: int, hi: int, v) -> Tuple[int, int]:
    """Equal range ``(first >= v, first > v)`` of ``v`` in a sorted window.

    A forward gallop from ``lo`` and a backward gallop from ``hi`` alternate
    probe by probe, so the cost is logarithmic in the distance from the
    nearer end.
    """
    if lo >= hi:
        return lo, lo
    if hi - lo == 1:
        # Both gallops would open on the same single probe.
        c = a.cmp(a.values[lo], v)
        return (hi, hi) if c < 0 else (lo, hi) if c == 0 else (lo, lo)
    probe = _prober(a, v)
    fwd = _gallop_forward(probe, lo, hi, False)
    bwd = _gallop_backward(probe, lo, hi, True)
    first, res = _race(fwd, bwd)
    if first == 0:
        left = res
        _, right = _race(_gallop_forward(probe, left, hi, True), bwd)
    else:
        right = res
        _, left = _race(_gallop_backward(probe, lo, right, False), fwd)
    return left, right


# -- selection ---------------------------------------------------------------


class MiddleMedian(NamedTuple):
    """Median of middles plus the value relation (-1, 0, 1) of every window's middle to it."""

    mu: object
    owner: int
    pos: int
    relations: List[int]


def _ordered_less(keys, cmp):
    def less(i, j):
        c = cmp(keys[i], keys[j])
        return c < 0 or (c == 0 and i < j)

    return less


def _insertion_sort(items, less):
    for i in range(1, len(items)):
        x = items[i]
        j = i - 1
        while j >= 0 and less(x, items[j]):
            items[j + 1] = items[j]
            j -= 1
        items[j + 1] = x


def _median3(x, y, z, less):
    trio = [x, y, z]
    _insertion_sort(trio, less)
    return trio[1]


def _ninther(keys, idx, cmp):
    less = _ordered_less(keys, cmp)
    size = len(idx)
    step = size // 9
    picks = [idx[t * step] for t in range(9)]
    return _median3(*(_median3(*picks[t:t + 3], less) for t in (0, 3, 6)), less)


def _mom_pivot(keys, idx, cmp):
    less = _ordered_less(keys, cmp)
    medians = []
    for s in range(0, len(idx), 5):
        group = idx[s:s + 5]
        _insertion_sort(group, less)
        medians.append(group[(len(group) - 1) // 2])
    sub = [keys[i] for i in medians]
    best, _ = select_with_relations(sub, (len(sub) - 1) // 2, cmp)
    return medians[best]


_SAMPLE_MIN = 600


def _sample_bounds(keys, idx, k, cmp):
    """Two pivots from an evenly spaced sample that bracket rank ``k`` with high probability."""
    size = len(idx)
    s = max(8, int(0.5 * size ** (2.0 / 3.0)))
    step = size / s
    sample = [idx[int(t * step)] for t in range(s)]
    gap = int(0.5 * math.sqrt(math.log(size) * s)) + 1
    centre = k * s / size
    lo_rank = max(0, int(centre) - gap)
    hi_rank = min(s - 1, int(centre) + gap)
    sub = [keys[i] for i in sample]
    u, _ = select_with_relations(sub, lo_rank, cmp)
    v, _ = select_with_relations(sub, hi_rank, cmp)
    return sample[u], sample[v]


def _single_pivot(keys, idx, cmp, guaranteed):
    size = len(idx)
    if guaranteed and size > 5:
        return _mom_pivot(keys, idx, cmp)
    if size >= 64:
        return _ninther(keys, idx, cmp)
    if size >= 16:
        return _median3(idx[0], idx[size >> 1], idx[-1], _ordered_less(keys, cmp))
    return idx[size >> 1]


def _two_pivot_round(keys, idx, k, p, q, cmp, rel):
    """Split around values ``keys[p] < keys[q]``; keep the group holding rank ``k``."""
    size = len(idx)
    pk, qk = keys[p], keys[q]
    low, mid, high = [], [], []
    if 2 * k < size:
        for i in idx:
            if i == p or i == q:
                mid.append(i)
                continue
            c = cmp(keys[i], pk)
            if c < 0:
                low.append(i)
            elif c > 0 and cmp(keys[i], qk) > 0:
                high.append(i)
            else:
                mid.append(i)
    else:
        for i in idx:
            if i == p or i == q:
                mid.append(i)
                continue
            c = cmp(keys[i], qk)
            if c > 0:
                high.append(i)
            elif c < 0 and cmp(keys[i], pk) < 0:
                low.append(i)
            else:
                mid.append(i)
    if k < len(low):
        for i in mid + high:
            rel[i] = 1
        kept = low
    elif k < len(low) + len(mid):
        for i in low:
            rel[i] = -1
        for i in high:
            rel[i] = 1
        k -= len(low)
        kept = sorted(mid)
    else:
        for i in low + mid:
            rel[i] = -1
        k -= len(low) + len(mid)
        kept = high
    return kept, k, 4 * len(kept) <= 3 * size


def select_with_relations(keys: Sequence, k: int, cmp: Callable) -> Tuple[int, List[int]]:
    """Index of the k-th smallest (0-based) key, ordering equal keys by index.

    Every round splits the candidates three ways against pivot values, so
    keys equal to a pivot value are never compared again. As a by-product
    each key's value relation to the answer (-1, 0 or 1) is known exactly
    and returned. Large rounds take two pivots from a sample (Floyd-Rivest
    style, about ``1.5m`` comparisons); smaller ones use a ninther or a
    median of three.
    After two consecutive rounds that each keep more than three quarters of
    the candidates the next pivot is a median of medians, so the worst case
    stays linear.
    """
    m = len(keys)
    if not 0 <= k < m:
        raise IndexError(f"rank {k} outside [0, {m})")
    rel = [0] * m
    idx = list(range(m))
    bad = 0
    while True:
        size = len(idx)
        if size == 1:
            return idx[0], rel
        p = None
        if bad < 2 and size >= _SAMPLE_MIN:
            p, q = _sample_bounds(keys, idx, k, cmp)
            pk, qk = keys[p], keys[q]
            if cmp(pk, qk) != 0:
                idx, k, shrunk = _two_pivot_round(keys, idx, k, p, q, cmp, rel)
                bad = 0 if shrunk else bad + 1
                continue
            # equal bracket values: one three-way round around them does better
        if p is None:
            p = _single_pivot(keys, idx, cmp, bad >= 2)
        pk = keys[p]
        low, eq, high = [], [], []
        for i in idx:
            if i == p:
                eq.append(i)
                continue
            c = cmp(keys[i], pk)
            (low if c < 0 else eq if c == 0 else high).append(i)
        if k < len(low):
            for i in eq:
                rel[i] = 1
            for i in high:
                rel[i] = 1
            idx = low
        elif k < len(low) + len(eq):
            for i in low:
                rel[i] = -1
            for i in high:
                rel[i] = 1
            return eq[k - len(low)], rel
        else:
            k -= len(low) + len(eq)
            for i in low:
                rel[i] = -1
            for i in eq:
                rel[i] = -1
            idx = high
        bad = bad + 1 if 4 * len(idx) > 3 * size else 0


def middle_of(lo: int, hi: int) -> int:
    """Position of the middle element of a non-empty window (offset ceil(len/2) - 1)."""
    return lo + ((hi - lo + 1) >> 1) - 1


def median_of_middles(a: InstrumentedArray, windows: Sequence[Window]) -> MiddleMedian:
    """Lower median of the middle elements of the given non-empty windows.

    Equal middles are ordered by window index. Returns the median value,
    the index of its window in ``windows``, its absolute position and the
    relation of every window's middle to the median.
    """
    if not windows:
        raise ValueError("median of middles needs at least one window")
    vals = a.values
    positions = [middle_of(lo, hi) for _, lo, hi in windows]
    keys = [vals[p] for p in positions]
    j, rel = select_with_relations(keys, (len(keys) - 1) >> 1, a.cmp)
    return MiddleMedian(keys[j], j, positions[j], rel)


def tie_bounds(ties, i: int, lo: int, hi: int) -> Tuple[int, int]:
    """Equal range around position ``i`` inside ``[lo, hi)`` read off the tie flags."""
    s = i
    while s > lo and ties[s]:
        s -= 1
    e = i + 1
    while e < hi and ties[e]:
        e += 1
    return s, e
