"""Synergistic sorters: DLM union/sort (merging) and Quick Synergy Sort (splitting)."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .core import (
    InstrumentedArray,
    RunDecomposition,
    Window,
    detect_runs,
    doubling_search,
    doubling_search_bidir,
    median_of_middles,
    middle_of,
    tie_bounds,
    pivot_sweeps,
)
from .measures import CostReport


# -- the partition step shared by sorting, multiselection and the deferred structures


@dataclass
class Partition:
    """Outcome of splitting a set of run windows around the median of middles.

    The band holds every element strictly between ``max_left`` and
    ``min_right``: the slice ``values[band_lo:band_hi]`` of the owner run
    plus ``eq`` copies of ``mu`` found in the other runs. ``left`` holds the
    windows of elements ``<= max_left`` and ``right`` those ``>= min_right``.
    """

    mu: object
    owner: int
    pos: int
    band_lo: int
    band_hi: int
    eq: int
    max_left: object
    min_right: object
    left: List[Window]
    right: List[Window]

    @property
    def band_size(self) -> int:
        return self.band_hi - self.band_lo + self.eq

    @property
    def left_size(self) -> int:
        return sum(w.hi - w.lo for w in self.left)

    @property
    def right_size(self) -> int:
        return sum(w.hi - w.lo for w in self.right)

    def band_values(self, values) -> list:
        return values[self.band_lo:self.pos] + [self.mu] * self.eq + values[self.pos:self.band_hi]

    def band_at(self, values, t: int):
        """The ``t``-th (0-based) element of the band without materializing it."""
        below = self.pos - self.band_lo
        if t < below:
            return values[self.band_lo + t]
        if t < below + self.eq:
            return self.mu
        return values[self.pos + t - below - self.eq]


def partition_step(a: InstrumentedArray, windows: Sequence[Window], ties) -> Partition:
    """One splitting round over at least two non-empty sorted windows.

    ``ties`` are the equal-neighbour flags from run detection. A middle
    already found equal to ``mu`` during selection gets its equal range from
    the flags for free; a middle found below (above) ``mu`` restricts the
    bidirectional search to the part of the window after (before) it.
    """
    mu, j, pos, rel = median_of_middles(a, windows)
    vals = a.values
    cmp = a.cmp
    max_left = min_right = None
    ranges: List[Optional[Tuple[int, int]]] = []
    eq = 0
    for k, (_, lo, hi) in enumerate(windows):
        if k == j:
            ranges.append(None)
            continue
        mid = middle_of(lo, hi)
        r = rel[k]
        if r == 0:
            left, right = tie_bounds(ties, mid, lo, hi)
        elif r < 0:
            left, right = doubling_search_bidir(a, mid + 1, hi, mu)
        else:
            left, right = doubling_search_bidir(a, lo, mid, mu)
        ranges.append((left, right))
        eq += right - left
        if left > lo:
            x = vals[left - 1]
            if max_left is None or cmp(x, max_left) > 0:
                max_left = x
        if right < hi:
            y = vals[right]
            if min_right is None or cmp(y, min_right) < 0:
                min_right = y
    run_j, lo_j, hi_j = windows[j]
    # With no candidate on a side, fall back to the equal range of mu in the owner run.
    eq_lo, eq_hi = tie_bounds(ties, pos, lo_j, hi_j)
    if max_left is None:
        band_lo = eq_lo
    else:
        band_lo = doubling_search(a, lo_j, eq_lo, max_left, "gt", "right") if eq_lo > lo_j else eq_lo
    if min_right is None:
        band_hi = eq_hi
    else:
        band_hi = doubling_search(a, eq_hi, hi_j, min_right, "geq", "left") if eq_hi < hi_j else eq_hi
    left_w: List[Window] = []
    right_w: List[Window] = []
    for k, w in enumerate(windows):
        if k == j:
            lo_part, hi_part = (w.lo, band_lo), (band_hi, w.hi)
        else:
            lo_part, hi_part = (w.lo, ranges[k][0]), (ranges[k][1], w.hi)
        if lo_part[1] > lo_part[0]:
            left_w.append(Window(w.run, *lo_part))
        if hi_part[1] > hi_part[0]:
            right_w.append(Window(w.run, *hi_part))
    return Partition(mu, j, pos, band_lo, band_hi, eq, max_left, min_right, left_w, right_w)


# -- Quick Synergy Sort


@dataclass
class PivotEvent:
    """A band placed at ranks ``[start, start + size)`` around value ``mu``."""

    mu: object
    start: int
    size: int
    owner_run: int


@dataclass
class SortResult:
    output: list
    report: CostReport
    pivots: List[PivotEvent] = field(default_factory=list)
    partitions: List[Partition] = field(default_factory=list, repr=False)


def _sort_windows(a, windows, ties, offset, out, pivots, partitions=None):
    vals = a.values
    stack = [(list(windows), offset)]
    while stack:
        ws, off = stack.pop()
        if not ws:
            continue
        if len(ws) == 1:
            _, lo, hi = ws[0]
            out[off:off + hi - lo] = vals[lo:hi]
            continue
        part = partition_step(a, ws, ties)
        start = off + part.left_size
        out[start:start + part.band_size] = part.band_values(vals)
        pivots.append(PivotEvent(part.mu, start, part.band_size, ws[part.owner].run))
        if partitions is not None:
            partitions.append(part)
        stack.append((part.right, start + part.band_size))
        stack.append((part.left, off))


def _report(name, a, before, **descriptors):
    return CostReport(name, a.comparisons - before, descriptors=descriptors)


def quick_synergy_sort(a: InstrumentedArray, keep_partitions: bool = False) -> SortResult:
    """Sort by recursive median-of-middles splitting of the input's runs."""
    before = a.comparisons
    runs = detect_runs(a)
    out = [None] * len(a)
    pivots: List[PivotEvent] = []
    parts: Optional[list] = [] if keep_partitions else None
    _sort_windows(a, runs.windows(), runs.ties, 0, out, pivots, parts)
    return SortResult(out, _report("quick_synergy_sort", a, before, n=len(a), rho=runs.rho),
                      pivots, parts or [])


def clip_windows(runs: RunDecomposition, lo: int, hi: int) -> List[Window]:
    """The parts of every run that fall inside ``[lo, hi)``."""
    out = []
    for w in runs.windows():
        s, e = max(w.lo, lo), min(w.hi, hi)
        if s < e:
            out.append(Window(w.run, s, e))
    return out


def global_sort(a: InstrumentedArray) -> SortResult:
    """Cut the input at its pivot positions and sort each piece independently."""
    before = a.comparisons
    runs = detect_runs(a)
    positions, _, _ = pivot_sweeps(a)
    n = len(a)
    out = [None] * n
    pivots: List[PivotEvent] = []
    cuts = [0] + positions + [n] if n else []
    for lo, hi in zip(cuts, cuts[1:]):
        _sort_windows(a, clip_windows(runs, lo, hi), runs.ties, lo, out, pivots)
    return SortResult(out, _report("global_sort", a, before, n=n, rho=runs.rho, phi=len(positions)), pivots)


# -- DLM union and sort


class _Head:
    """Current head of a run inside the union heap; one comparison per ``<``."""

    __slots__ = ("value", "run", "idx", "hi", "cmp")

    def __init__(self, value, run, idx, hi, cmp):
        self.value, self.run, self.idx, self.hi, self.cmp = value, run, idx, hi, cmp

    def __lt__(self, other):
        c = self.cmp(self.value, other.value)
        return c < 0 or (c == 0 and self.run < other.run)


@dataclass
class UnionOutput:
    """Ascending ``(value, multiplicity)`` pairs and the certified blocks.

    ``trace`` lists ``(run, start, length)`` in output order. A segment of
    equal values (a value of multiplicity two or more) appears as one
    entry per run that holds copies of it; ``exploded_trace`` splits such
    entries into single-element blocks.
    """

    pairs: List[Tuple[object, int]]
    trace: List[Tuple[int, int, int]]
    multi: List[bool] = field(default_factory=list, repr=False)

    def exploded_trace(self) -> List[Tuple[int, int, int]]:
        out = []
        for (run, start, length), m in zip(self.trace, self.multi):
            if m:
                out.extend((run, start + i, 1) for i in range(length))
            else:
                out.append((run, start, length))
        return out


def _tie_end(ties, i, hi):
    """End of the in-run group of values equal to ``values[i]`` (free: uses tie flags)."""
    j = i + 1
    while j < hi and ties[j]:
        j += 1
    return j


def _emit_segment(vals, ties, run, lo, hi, pairs, trace, multi, singles_known=False):
    """Emit ``values[lo:hi]`` of one run whose values occur nowhere else."""
    i = lo
    block_start = lo
    while i < hi:
        e = _tie_end(ties, i, hi)
        if e - i > 1:
            if block_start < i:
                trace.append((run, block_start, i - block_start))
                multi.append(False)
            pairs.append((vals[i], e - i))
            trace.append((run, i, e - i))
            multi.append(True)
            block_start = e
        else:
            pairs.append((vals[i], 1))
        i = e
    if block_start < hi:
        trace.append((run, block_start, hi - block_start))
        multi.append(False)


def dlm_union(a: InstrumentedArray, runs: RunDecomposition) -> UnionOutput:
    """Union of the sorted runs, certifying whole blocks by doubling searches."""
    vals = a.values
    ties = runs.ties
    cmp = a.cmp
    pairs: List[Tuple[object, int]] = []
    trace: List[Tuple[int, int, int]] = []
    multi: List[bool] = []
    heap = [_Head(vals[w.lo], w.run, w.lo, w.hi, cmp) for w in runs.windows() if w.hi > w.lo]
    heapq.heapify(heap)

    def advance(h, i):
        if i < h.hi:
            h.value, h.idx = vals[i], i
            heapq.heappush(heap, h)

    while heap:
        top = heapq.heappop(heap)
        if not heap:
            _emit_segment(vals, ties, top.run, top.idx, top.hi, pairs, trace, multi)
            break
        nxt = heap[0]
        c = cmp(top.value, nxt.value)
        if c == 0:
            group = [top]
            while heap and (heap[0] is nxt or cmp(heap[0].value, top.value) == 0):
                group.append(heapq.heappop(heap))
                nxt = None
            m = 0
            ends = []
            for h in group:
                e = _tie_end(ties, h.idx, h.hi)
                trace.append((h.run, h.idx, e - h.idx))
                multi.append(True)
                m += e - h.idx
                ends.append(e)
            pairs.append((top.value, m))
            for h, e in zip(group, ends):
                advance(h, e)
            continue
        end = _tie_end(ties, top.idx, top.hi)
        if end - top.idx > 1:
            # repeated only inside its own run
            pairs.append((top.value, end - top.idx))
            trace.append((top.run, top.idx, end - top.idx))
            multi.append(True)
            advance(top, end)
            continue
        b = doubling_search(a, top.idx + 1, top.hi, nxt.value, "geq", "left")
        _emit_segment(vals, ties, top.run, top.idx, b, pairs, trace, multi)
        advance(top, b)
    return UnionOutput(pairs, trace, multi)


@dataclass
class DlmResult:
    output: list
    union: UnionOutput
    report: CostReport


def dlm_sort(a: InstrumentedArray) -> DlmResult:
    """Detect runs, merge them with :func:`dlm_union`, expand the counted output."""
    before = a.comparisons
    runs = detect_runs(a)
    union = dlm_union(a, runs)
    out = []
    for v, m in union.pairs:
        out.extend([v] * m)
    return DlmResult(out, union, _report("dlm_sort", a, before, n=len(a), rho=runs.rho))
