"""Online rank/select structures that sort only as much as the queries force.

Rank space ``[0, n)`` is covered by consecutive segments in value order.
A :class:`Record` is a resolved segment whose sorted contents are known; a
:class:`Gap` is an unresolved one, still held as run windows, whose
minimum and maximum values are known exactly. Answering a query splits
the gaps on its path with the same partition step Quick Synergy Sort uses.

Two meters are kept apart: key comparisons (on the instrumented array) and
index steps (navigation inside the segment index, no key involved except
where the index is itself keyed by value).
"""
from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from typing import Callable, List, Optional, Union

from .core import InstrumentedArray, Window, detect_runs, pivot_sweeps
from .measures import CostReport
from .synergy_sort import clip_windows, partition_step


@dataclass
class Record:
    """Resolved ranks ``[start, start + size)``.

    Contents are ``values[lo:pos]``, then ``eq`` copies of ``mu``, then
    ``values[pos:hi]``; a plain sorted slice has ``pos == lo`` and ``eq == 0``.
    """

    start: int
    size: int
    lo: int
    pos: int
    eq: int
    mu: object
    hi: int
    vmin: object
    vmax: object

    def value_at(self, vals, t: int):
        below = self.pos - self.lo
        if t < below:
            return vals[self.lo + t]
        if t < below + self.eq:
            return self.mu
        return vals[self.pos + t - below - self.eq]

    def values(self, vals) -> list:
        return vals[self.lo:self.pos] + [self.mu] * self.eq + vals[self.pos:self.hi]


@dataclass
class Gap:
    """Unresolved ranks ``[start, start + size)`` held as sorted run windows."""

    start: int
    size: int
    windows: List[Window]
    vmin: object
    vmax: object


Segment = Union[Record, Gap]


def _slice_record(vals, start, w: Window) -> Record:
    return Record(start, w.hi - w.lo, w.lo, w.lo, 0, None, w.hi, vals[w.lo], vals[w.hi - 1])


def _piece(vals, start, windows, vmin, vmax) -> Segment:
    if len(windows) == 1:
        return _slice_record(vals, start, windows[0])
    return Gap(start, sum(w.hi - w.lo for w in windows), windows, vmin, vmax)


class _DeferredBase:
    """Shared query logic; subclasses provide the segment index."""

    name = "deferred"

    def __init__(self, a: InstrumentedArray):
        self.a = a
        self._before = a.comparisons
        vals = a.values
        n = len(vals)
        self.n = n
        runs = detect_runs(a)
        self.rho = runs.rho
        self.ties = runs.ties
        positions, pmax, smin = pivot_sweeps(a)
        self.phi = len(positions)
        self.gaps_split = 0
        segments: List[Segment] = []
        cuts = [0] + positions + [n] if n else []
        # Pre-existing pivot positions become boundaries between gaps; the
        # sweeps give every piece its exact minimum and maximum for free.
        for lo, hi in zip(cuts, cuts[1:]):
            segments.append(_piece(vals, lo, clip_windows(runs, lo, hi), smin[lo], pmax[hi - 1]))
        self.build_comparisons = a.comparisons - self._before
        self._init_index(segments)

    # -- subclass hooks

    def _init_index(self, segments):
        raise NotImplementedError

    def _locate_rank(self, t: int) -> Segment:
        raise NotImplementedError

    def _first_max_geq(self, x) -> Optional[Segment]:
        raise NotImplementedError

    def _replace(self, old: Segment, pieces: List[Segment]) -> None:
        raise NotImplementedError

    # -- queries

    @property
    def comparisons(self) -> int:
        return self.a.comparisons - self._before

    def select(self, i: int):
        """The i-th smallest element (1-based)."""
        if not 1 <= i <= self.n:
            raise ValueError(f"select rank {i} outside [1, {self.n}]")
        t = i - 1
        seg = self._locate_rank(t)
        while isinstance(seg, Gap):
            left, band, right = self._split(seg)[:3]
            if t < band.start:
                seg = left
            elif t < band.start + band.size:
                seg = band
            else:
                seg = right
            self._focus(seg)
        return seg.value_at(self.a.values, t - seg.start)

    def rank(self, x) -> int:
        """Number of elements strictly smaller than ``x``."""
        if self.n == 0:
            return 0
        cmp = self.a.cmp
        seg = self._first_max_geq(x)
        if seg is None:
            return self.n
        while True:
            if isinstance(seg, Record):
                return seg.start + self._count_below(seg, x)
            if cmp(x, seg.vmin) <= 0:
                return seg.start
            left, band, right, _ = self._split(seg)
            if left is not None and cmp(x, left.vmax) <= 0:
                seg = left
            elif right is None or cmp(x, band.vmax) <= 0:
                seg = band
            else:
                seg = right
            self._focus(seg)

    def _count_below(self, rec: Record, x) -> int:
        """Elements of ``rec`` smaller than ``x``, given ``x <= rec.vmax``."""
        vals = self.a.values
        cmp = self.a.cmp
        lo, hi = 0, rec.size - 1
        while lo < hi:
            mid = (lo + hi) >> 1
            if cmp(rec.value_at(vals, mid), x) < 0:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def _split(self, gap: Gap):
        """Partition a gap; returns (left or None, band record, right or None, partition)."""
        vals = self.a.values
        part = partition_step(self.a, gap.windows, self.ties)
        self.gaps_split += 1
        bstart = gap.start + part.left_size
        size = part.band_size
        left = _piece(vals, gap.start, part.left, gap.vmin, part.max_left) if part.left else None
        band = Record(bstart, size, part.band_lo, part.pos, part.eq, part.mu, part.band_hi,
                      part.band_at(vals, 0), part.band_at(vals, size - 1))
        right = _piece(vals, bstart + size, part.right, part.min_right, gap.vmax) if part.right else None
        self._replace(gap, [p for p in (left, band, right) if p is not None])
        return left, band, right, part

    def _focus(self, seg: Segment) -> None:
        pass

    # -- inspection

    def segments(self) -> List[Segment]:
        raise NotImplementedError

    def reconstruct(self) -> list:
        """Rank-ordered contents with ``None`` at unresolved ranks."""
        out = [None] * self.n
        vals = self.a.values
        for s in self.segments():
            if isinstance(s, Record):
                out[s.start:s.start + s.size] = s.values(vals)
        return out

    def report(self) -> CostReport:
        return CostReport(self.name, self.comparisons, self.index_steps,
                          descriptors={"n": self.n, "rho": self.rho, "phi": self.phi,
                                       "gaps_split": self.gaps_split})


class RamDeferred(_DeferredBase):
    """Mark vector over ranks plus a sorted array of segment starts.

    ``resolved`` is the mark vector: byte ``t`` is 1 once rank ``t`` lies in
    a record. Predecessor search over the starts is a binary search, each
    probe counted as one index step.
    """

    name = "ram_deferred"

    def _init_index(self, segments):
        self.index_steps = 0
        self.update_steps = 0
        self.starts = [s.start for s in segments]
        self.segs = segments
        self.resolved = bytearray(self.n)
        for s in segments:
            if isinstance(s, Record):
                self.resolved[s.start:s.start + s.size] = b"\x01" * s.size

    def _locate_rank(self, t):
        self.index_steps += max(1, len(self.starts).bit_length())
        return self.segs[bisect.bisect_right(self.starts, t) - 1]

    def _first_max_geq(self, x):
        cmp = self.a.cmp
        lo, hi = 0, len(self.segs)
        while lo < hi:
            mid = (lo + hi) >> 1
            self.index_steps += 1
            if cmp(self.segs[mid].vmax, x) < 0:
                lo = mid + 1
            else:
                hi = mid
        return self.segs[lo] if lo < len(self.segs) else None

    def _replace(self, old, pieces):
        i = bisect.bisect_right(self.starts, old.start) - 1
        self.starts[i:i + 1] = [p.start for p in pieces]
        self.segs[i:i + 1] = pieces
        self.update_steps += len(pieces)
        for p in pieces:
            if isinstance(p, Record):
                self.resolved[p.start:p.start + p.size] = b"\x01" * p.size

    def segments(self):
        return list(self.segs)


# -- finger-searchable index


class _Node:
    __slots__ = ("seg", "nxt", "prv", "height")

    def __init__(self, seg, height):
        self.seg = seg
        self.height = height
        self.nxt: list = [None] * height
        self.prv: list = [None] * height


class FingerSkipList:
    """Level-linked skip list with a finger at the last accessed node.

    Searches take a monotone predicate ``before(node)`` (true on a prefix of
    the list) and return the last node where it holds, or ``None``. They
    start at the finger and walk forward or backward, climbing while the
    target is still ahead, so the expected cost is logarithmic in the
    number of nodes between the finger and the answer.
    """

    MAX_HEIGHT = 32

    def __init__(self, seed: int = 0):
        self._rng = random.Random(seed)
        self.head = _Node(None, self.MAX_HEIGHT)
        self.tail = _Node(None, self.MAX_HEIGHT)
        for h in range(self.MAX_HEIGHT):
            self.head.nxt[h] = self.tail
            self.tail.prv[h] = self.head
        self.finger = None
        self.steps = 0
        self.update_steps = 0
        self.size = 0

    def _height(self):
        h = 1
        while h < self.MAX_HEIGHT and self._rng.random() < 0.5:
            h += 1
        return h

    def insert_after(self, left: _Node, seg) -> _Node:
        node = _Node(seg, self._height())
        p = left
        for h in range(node.height):
            while p.height <= h:
                p = p.prv[h - 1]
                self.update_steps += 1
            nx = p.nxt[h]
            node.prv[h], node.nxt[h] = p, nx
            p.nxt[h] = node
            nx.prv[h] = node
            self.update_steps += 1
        self.size += 1
        return node

    def remove(self, node: _Node) -> _Node:
        """Unlink ``node``; returns its level-0 predecessor."""
        for h in range(node.height):
            node.prv[h].nxt[h] = node.nxt[h]
            node.nxt[h].prv[h] = node.prv[h]
            self.update_steps += 1
        self.size -= 1
        if self.finger is node:
            self.finger = None
        return node.prv[0]

    def __iter__(self):
        x = self.head.nxt[0]
        while x is not self.tail:
            yield x
            x = x.nxt[0]

    def _ok(self, node, before):
        self.steps += 1
        return before(node)

    def search(self, before: Callable[[_Node], bool]) -> Optional[_Node]:
        x = self.finger
        if x is None:
            x = self.head
            h = self.MAX_HEIGHT - 1
            while h > 0 and x.nxt[h] is self.tail:
                h -= 1
            found = self._descend_forward(x, h, before)
        elif self._ok(x, before):
            found = self._forward(x, before)
        else:
            found = self._backward(x, before)
        return None if found is self.head else found

    def _forward(self, x, before):
        h = 0
        while True:
            nx = x.nxt[h]
            if nx is self.tail or not self._ok(nx, before):
                break
            x = nx
            if x.height > h + 1:
                h += 1
        return self._descend_forward(x, h, before)

    def _descend_forward(self, x, h, before):
        while h >= 0:
            nx = x.nxt[h]
            while nx is not self.tail and self._ok(nx, before):
                x = nx
                nx = x.nxt[h]
            h -= 1
        return x

    def _backward(self, x, before):
        h = 0
        while True:
            pv = x.prv[h]
            if pv is self.head or self._ok(pv, before):
                break
            x = pv
            if x.height > h + 1:
                h += 1
        while h >= 0:
            pv = x.prv[h]
            while pv is not self.head and not self._ok(pv, before):
                x = pv
                pv = x.prv[h]
            h -= 1
        return x.prv[0]

    def distance(self, a: _Node, b: _Node) -> int:
        """Number of level-0 hops between two nodes (test-only helper, linear time)."""
        if a is None or b is None:
            return 0
        for start, end in ((a, b), (b, a)):
            d, x = 0, start
            while x is not self.tail:
                if x is end:
                    return d
                x = x.nxt[0]
                d += 1
        raise ValueError("nodes are not in this list")


class FingerDeferred(_DeferredBase):
    """Two finger-searchable indexes over the segments: by start rank and by maximum value.

    ``track_distances`` records, for every search, the number of segments
    between the previous finger and the answer (linear time; for tests).
    """

    name = "finger_deferred"

    def __init__(self, a: InstrumentedArray, seed: int = 0, track_distances: bool = False):
        self._seed = seed
        self.track_distances = track_distances
        self.distances: List[int] = []
        super().__init__(a)

    def _init_index(self, segments):
        self.by_rank = FingerSkipList(self._seed)
        self.by_value = FingerSkipList(self._seed + 1)
        self._nodes = {}
        left_r, left_v = self.by_rank.head, self.by_value.head
        for s in segments:
            left_r = self.by_rank.insert_after(left_r, s)
            left_v = self.by_value.insert_after(left_v, s)
            self._nodes[id(s)] = (left_r, left_v)
        self.by_rank.update_steps = self.by_value.update_steps = 0

    @property
    def index_steps(self):
        return self.by_rank.steps + self.by_value.steps

    @property
    def update_steps(self):
        return self.by_rank.update_steps + self.by_value.update_steps

    def _search(self, lst, before):
        old = lst.finger
        node = lst.search(before)
        if self.track_distances and node is not None:
            self.distances.append(lst.distance(old, node) if old is not None else 0)
        return node

    def _locate_rank(self, t):
        node = self._search(self.by_rank, lambda nd: nd.seg.start <= t)
        self.by_rank.finger = node
        return node.seg

    def _first_max_geq(self, x):
        cmp = self.a.cmp
        node = self._search(self.by_value, lambda nd: cmp(nd.seg.vmax, x) < 0)
        nxt = (node or self.by_value.head).nxt[0]
        if nxt is self.by_value.tail:
            self.by_value.finger = node
            return None
        self.by_value.finger = nxt
        return nxt.seg

    def _replace(self, old, pieces):
        node_r, node_v = self._nodes.pop(id(old))
        left_r = self.by_rank.remove(node_r)
        left_v = self.by_value.remove(node_v)
        for p in pieces:
            left_r = self.by_rank.insert_after(left_r, p)
            left_v = self.by_value.insert_after(left_v, p)
            self._nodes[id(p)] = (left_r, left_v)

    def _focus(self, seg):
        node_r, node_v = self._nodes[id(seg)]
        self.by_rank.finger = node_r
        self.by_value.finger = node_v

    def segments(self):
        return [nd.seg for nd in self.by_rank]


def ram_dds_new(a: InstrumentedArray) -> RamDeferred:
    return RamDeferred(a)


def finger_dds_new(a: InstrumentedArray, seed: int = 0) -> FingerDeferred:
    return FingerDeferred(a, seed=seed)
