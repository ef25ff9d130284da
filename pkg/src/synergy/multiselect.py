"""Offline multiselection: answer a batch of select ranks while sorting only as needed."""
from __future__ import annotations

import bisect
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .core import InstrumentedArray, Window, detect_runs, pivot_sweeps
from .measures import CostReport, predictor_multiselect
from .synergy_sort import PivotEvent, clip_windows, partition_step


@dataclass
class QueryBatch:
    """Select ranks (1-based), sorted and deduplicated, remembering the caller's order."""

    ranks: List[int]
    original: List[int]

    @classmethod
    def from_ranks(cls, ranks: Sequence[int], n: int) -> "QueryBatch":
        original = [int(r) for r in ranks]
        for r in original:
            if not 1 <= r <= n:
                raise ValueError(f"select rank {r} outside [1, {n}]")
        return cls(sorted(set(original)), original)

    def fan_out(self, answers: Dict[int, object]) -> list:
        return [answers[r] for r in self.original]


@dataclass
class PartialOrderState:
    """What multiselection learned: placed bands, fully sorted pieces, untouched regions."""

    n: int
    rho: int
    pivots: List[PivotEvent] = field(default_factory=list)
    resolved: List[Tuple[int, list]] = field(default_factory=list)
    untouched: List[Tuple[int, List[Window]]] = field(default_factory=list)
    answers: Dict[int, object] = field(default_factory=dict)

    @property
    def xi(self) -> int:
        return len(self.pivots)

    def materialize(self) -> list:
        """Rank-ordered view with ``None`` at every unresolved rank."""
        out = [None] * self.n
        for start, vals in self.resolved:
            out[start:start + len(vals)] = vals
        return out

    def profile(self, values) -> dict:
        """Selection-block parameters of the computed pivots (analysis oracle, uncounted).

        Every run is cut at the first position holding a value ``>=`` each
        pivot value; the non-empty pieces are the selection blocks. A pivot
        block is a selection block holding copies of a pivot's value.
        """
        raw = list(values.values if isinstance(values, InstrumentedArray) else values)
        runs = _plain_runs(raw)
        pivot_vals = sorted({p.mu for p in self.pivots})
        counts = Counter(raw)
        sel_sizes: List[int] = []
        holders = dict.fromkeys(pivot_vals, 0)
        seg_runs = [0] * (len(pivot_vals) + 1)
        lows = [None] + pivot_vals
        highs = pivot_vals + [None]
        for run in runs:
            cuts = [0] + [bisect.bisect_left(run, v) for v in pivot_vals] + [len(run)]
            sel_sizes.extend(e - s for s, e in zip(cuts, cuts[1:]) if e > s)
            for v in pivot_vals:
                if bisect.bisect_right(run, v) > bisect.bisect_left(run, v):
                    holders[v] += 1
            # runs holding a value strictly between consecutive pivot values
            for i, (lo_v, hi_v) in enumerate(zip(lows, highs)):
                s = 0 if lo_v is None else bisect.bisect_right(run, lo_v)
                e = len(run) if hi_v is None else bisect.bisect_left(run, hi_v)
                if e > s:
                    seg_runs[i] += 1
        return {
            "sel_sizes": sel_sizes,
            "beta": len(sel_sizes),
            "pivot_weights": [holders[v] for v in pivot_vals if counts[v] > 1],
            "seg_runs": seg_runs,
            "rho": len(runs),
        }

    def predictor(self, values) -> float:
        p = self.profile(values)
        return predictor_multiselect(self.n, p["sel_sizes"], p["beta"], p["rho"],
                                     p["pivot_weights"], p["seg_runs"])


def _plain_runs(raw) -> List[list]:
    runs: List[list] = []
    for i, v in enumerate(raw):
        if i == 0 or raw[i - 1] > v:
            runs.append([])
        runs[-1].append(v)
    return runs


@dataclass
class MultiselectResult:
    answers: list
    state: PartialOrderState
    report: CostReport


def _select_in(a, windows, ties, offset, ranks, state):
    """Answer 1-based ``ranks`` (sorted) inside the sub-instance placed at ``offset``."""
    vals = a.values
    stack = [(list(windows), offset, list(ranks))]
    while stack:
        ws, off, qs = stack.pop()
        if not ws:
            continue
        if not qs:
            state.untouched.append((off, ws))
            continue
        if len(ws) == 1:
            _, lo, hi = ws[0]
            for r in qs:
                state.answers[r] = vals[lo + r - 1 - off]
            state.resolved.append((off, vals[lo:hi]))
            continue
        part = partition_step(a, ws, ties)
        start = off + part.left_size
        end = start + part.band_size
        state.pivots.append(PivotEvent(part.mu, start, part.band_size, ws[part.owner].run))
        state.resolved.append((start, part.band_values(vals)))
        cut_lo = bisect.bisect_right(qs, start)
        cut_hi = bisect.bisect_right(qs, end)
        for r in qs[cut_lo:cut_hi]:
            state.answers[r] = part.band_at(vals, r - 1 - start)
        stack.append((part.right, end, qs[cut_hi:]))
        stack.append((part.left, off, qs[:cut_lo]))


def multiselect(a: InstrumentedArray, ranks: Sequence[int]) -> MultiselectResult:
    """Answer select queries (1-based ranks) in the caller's order."""
    batch = QueryBatch.from_ranks(ranks, len(a))
    before = a.comparisons
    runs = detect_runs(a)
    state = PartialOrderState(len(a), runs.rho)
    _select_in(a, runs.windows(), runs.ties, 0, batch.ranks, state)
    report = CostReport("multiselect", a.comparisons - before,
                        descriptors={"n": len(a), "rho": runs.rho, "q": len(batch.ranks)})
    return MultiselectResult(batch.fan_out(state.answers), state, report)


def multiselect_with_global(a: InstrumentedArray, ranks: Sequence[int]) -> MultiselectResult:
    """Cut at pivot positions first, then multiselect inside each piece holding queries."""
    batch = QueryBatch.from_ranks(ranks, len(a))
    before = a.comparisons
    n = len(a)
    runs = detect_runs(a)
    positions, _, _ = pivot_sweeps(a)
    state = PartialOrderState(n, runs.rho)
    cuts = [0] + positions + [n] if n else []
    for lo, hi in zip(cuts, cuts[1:]):
        i = bisect.bisect_right(batch.ranks, lo)
        e = bisect.bisect_right(batch.ranks, hi)
        _select_in(a, clip_windows(runs, lo, hi), runs.ties, lo, batch.ranks[i:e], state)
    report = CostReport("multiselect_with_global", a.comparisons - before,
                        descriptors={"n": n, "rho": runs.rho, "phi": len(positions), "q": len(batch.ranks)})
    return MultiselectResult(batch.fan_out(state.answers), state, report)
