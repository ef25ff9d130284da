"""Difficulty measures of a multiset and evaluable cost predictors.

Everything here is an analysis oracle: it may sort freely and never touches
a comparison counter.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence

import numpy as np

from .core import InstrumentedArray

LN2 = math.log(2.0)


def entropy(counts: Sequence[int]) -> float:
    """``sum(c/n * log2(n/c))`` over positive counts, in bits."""
    counts = list(counts)
    if not counts:
        raise ValueError("entropy of an empty distribution is undefined")
    if any(c <= 0 for c in counts):
        raise ValueError("counts must be positive")
    n = sum(counts)
    return sum(c / n * math.log2(n / c) for c in counts)


def _xlog2x(x) -> float:
    return x * math.log2(x) if x > 0 else 0.0


def log2_binomial(r: int, m: int) -> float:
    """``log2 C(r, m)`` via log-gamma; ``m > r`` is clamped to ``C(r, r) = 1``."""
    if m >= r or m <= 0:
        return 0.0
    return (math.lgamma(r + 1) - math.lgamma(m + 1) - math.lgamma(r - m + 1)) / LN2


def _raw(values):
    return values.values if isinstance(values, InstrumentedArray) else values


def _as_int_array(values) -> np.ndarray:
    vals = _raw(values)
    arr = np.asarray(vals)
    if arr.dtype.kind in "iub":
        return arr.astype(np.int64, copy=False)
    if arr.dtype.kind == "f":
        return arr
    # opaque orderable keys: replace by dense ranks
    distinct = sorted(set(vals))
    rank = {v: i for i, v in enumerate(distinct)}
    return np.fromiter((rank[v] for v in vals), dtype=np.int64, count=len(vals))


def run_ids(arr: np.ndarray) -> np.ndarray:
    """Run id of every position (runs are maximal non-decreasing segments)."""
    n = len(arr)
    rid = np.zeros(n, dtype=np.int64)
    if n > 1:
        rid[1:] = np.cumsum(arr[1:] < arr[:-1])
    return rid


@dataclass
class BlockDecomposition:
    """Blocks of the input in sorted-output order and the partition they induce.

    ``block_run``, ``block_start`` and ``block_len`` describe block ``i`` as
    ``values[block_start[i] : block_start[i] + block_len[i]]`` inside run
    ``block_run[i]``. ``pi_weights`` holds one weight per partition member:
    1 for an ordinary block, the multiplicity for a repeated value.
    """

    n: int
    rho: int
    block_run: np.ndarray
    block_start: np.ndarray
    block_len: np.ndarray
    pi_weights: np.ndarray
    order: np.ndarray = field(repr=False)

    @property
    def delta(self) -> int:
        return len(self.block_len)

    @property
    def chi(self) -> int:
        return len(self.pi_weights)

    @property
    def blocks(self) -> List[tuple]:
        return list(zip(self.block_run.tolist(), self.block_start.tolist(), self.block_len.tolist()))

    @property
    def pi_members(self) -> List[tuple]:
        return [("block" if w == 1 else "multiplicity", w) for w in self.pi_weights.tolist()]


def block_decomposition(values) -> BlockDecomposition:
    """Blocks: maximal run segments that stay contiguous in the sorted output.

    Every copy of a value of multiplicity at least two is a block of its own,
    and all copies together form one weighted member of the partition.
    Equal values are ordered by input position.
    """
    arr = _as_int_array(values)
    n = len(arr)
    if n == 0:
        empty = np.zeros(0, dtype=np.int64)
        return BlockDecomposition(0, 0, empty, empty, empty, empty, empty)
    rid = run_ids(arr)
    order = np.argsort(arr, kind="stable")
    sv = arr[order]
    new_val = np.ones(n, dtype=bool)
    new_val[1:] = sv[1:] != sv[:-1]
    group = np.cumsum(new_val) - 1
    mult = np.bincount(group)[group]
    single = mult == 1
    starts = np.ones(n, dtype=bool)
    starts[1:] = ~(
        (order[1:] == order[:-1] + 1)
        & (rid[order[1:]] == rid[order[:-1]])
        & single[1:]
        & single[:-1]
    )
    first = np.flatnonzero(starts)
    length = np.diff(np.append(first, n))
    bstart = order[first]
    multi = ~single[first]
    member = ~multi | new_val[first]
    weights = np.where(multi, mult[first], 1)[member]
    return BlockDecomposition(
        n=n,
        rho=int(rid[-1]) + 1,
        block_run=rid[bstart],
        block_start=bstart,
        block_len=length,
        pi_weights=weights.astype(np.int64),
        order=order,
    )


def multiplicities(values) -> List[int]:
    return list(Counter(_raw(values)).values())


def run_sizes(values) -> List[int]:
    arr = _as_int_array(values)
    if len(arr) == 0:
        return []
    return np.bincount(run_ids(arr)).tolist()


def pivot_position_count(values) -> int:
    arr = _as_int_array(values)
    if len(arr) <= 1:
        return 0
    pmax = np.maximum.accumulate(arr)
    smin = np.minimum.accumulate(arr[::-1])[::-1]
    return int(np.count_nonzero(pmax[:-1] <= smin[1:]))


# -- predictors ---------------------------------------------------------------


def predictor_munro_spira(n: int, mults: Sequence[int]) -> float:
    return n * (1 + entropy(mults)) if n else 0.0


def predictor_takaoka(n: int, sizes: Sequence[int]) -> float:
    return n * (1 + entropy(sizes)) if n else 0.0


def predictor_synergy(n: int, block_sizes: Iterable[int], pi_weights: Iterable[int], rho: int) -> float:
    """``n + sum log2 g_i + sum log2 C(rho, m_i)``."""
    g = np.asarray(list(block_sizes) if not isinstance(block_sizes, np.ndarray) else block_sizes, dtype=float)
    total = float(n) + float(np.log2(g[g > 0]).sum()) if len(g) else float(n)
    w = np.asarray(list(pi_weights) if not isinstance(pi_weights, np.ndarray) else pi_weights, dtype=np.int64)
    if len(w):
        uniq, cnt = np.unique(w, return_counts=True)
        total += sum(c * log2_binomial(rho, int(m)) for m, c in zip(uniq.tolist(), cnt.tolist()))
    return total


def predictor_multiselect(n: int, sel_sizes: Sequence[int], beta: int, rho: int,
                          pivot_weights: Sequence[int], seg_runs: Sequence[int]) -> float:
    """``n + sum log2 s_i + beta log2 rho - sum m_i log2 m_i - sum rho_i log2 rho_i``."""
    total = float(n)
    total += sum(math.log2(s) for s in sel_sizes if s > 0)
    total += beta * math.log2(rho) if rho > 0 else 0.0
    total -= sum(_xlog2x(m) for m in pivot_weights)
    total -= sum(_xlog2x(r) for r in seg_runs)
    return total


def predictor_envelope(n: int, ranks: Iterable[int]) -> float:
    """``n log2 n - sum Delta_i log2 Delta_i`` over the gaps between sorted query ranks."""
    rs = sorted(set(ranks))
    if rs and (rs[0] < 1 or rs[-1] > n):
        raise ValueError(f"query rank outside [1, {n}]")
    bounds = [0] + rs + [n]
    return _xlog2x(n) - sum(_xlog2x(b - a) for a, b in zip(bounds, bounds[1:]))


@dataclass
class CostReport:
    algorithm: str
    comparisons: int
    index_steps: int = 0
    predictors: Dict[str, float] = field(default_factory=dict)
    descriptors: Dict[str, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "comparisons": self.comparisons,
            "index_steps": self.index_steps,
            "predictors": dict(self.predictors),
            "descriptors": dict(self.descriptors),
        }


def instance_profile(values) -> dict:
    """Descriptors (n, rho, sigma, delta, chi, phi) and the instance-only predictors."""
    vals = list(_raw(values))
    n = len(vals)
    bd = block_decomposition(vals)
    mults = multiplicities(vals)
    sizes = run_sizes(vals)
    return {
        "n": n,
        "rho": bd.rho,
        "sigma": len(mults),
        "delta": bd.delta,
        "chi": bd.chi,
        "phi": pivot_position_count(vals),
        "munro_spira": predictor_munro_spira(n, mults) if n else 0.0,
        "takaoka": predictor_takaoka(n, sizes) if n else 0.0,
        "synergy": predictor_synergy(n, bd.block_len, bd.pi_weights, bd.rho),
    }
