"""Instance and query generators, brute-force oracles, and the benchmark runner."""
from __future__ import annotations

import bisect
import csv
import hashlib
import io
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

from .baselines import merge_sort_counters, minimal_merge_sort, parallel_race, small_vs_small_sort
from .core import InstrumentedArray
from .deferred import FingerDeferred, RamDeferred
from .measures import (
    CostReport,
    block_decomposition,
    instance_profile,
    predictor_envelope,
)
from .multiselect import multiselect, multiselect_with_global
from .succinct import build_rank_aware, build_select_aware
from .synergy_sort import dlm_sort, global_sort, quick_synergy_sort

FAMILIES = ("example1", "example2", "example3", "example4", "random", "file")
PROFILES = ("uniform", "single", "all", "clustered")
ORDERS = ("sorted", "reverse", "random", "ping-pong")
CSV_HEADER = [
    "family", "n", "sigma", "rho", "phi", "delta", "chi", "algorithm", "qspec",
    "comparisons", "index_steps", "wall_ns", "pred_ms", "pred_tk", "pred_syn", "pred_env",
]


# -- instances


@dataclass(frozen=True)
class InstanceSpec:
    """What to generate. ``sigma``/``rho``/``phi`` of ``None`` mean "family default".

    For ``random``: ``rho`` sorted chunks of values drawn from ``[1, sigma]``;
    no ``sigma`` means distinct values (a random permutation of ``1..n``),
    no ``rho`` means unsorted draws. ``phi`` asks for that many value-disjoint
    cuts. ``path`` names the instance file for the ``file`` family.
    """

    family: str
    n: int = 0
    sigma: Optional[int] = None
    rho: Optional[int] = None
    phi: Optional[int] = None
    seed: int = 0
    path: Optional[str] = None

    def label(self) -> str:
        return self.family if self.family != "file" else f"file:{Path(self.path).name}"


def _require(cond: bool, message: str):
    if not cond:
        raise ValueError(message)


def _example3(n, sigma, rho):
    if sigma is None and rho is None:
        raise ValueError("example3 needs sigma or rho (n = rho * sigma)")
    if sigma is None:
        _require(rho > 0 and n % rho == 0, f"example3 needs n divisible by rho (n={n}, rho={rho})")
        sigma = n // rho
    if rho is None:
        _require(sigma > 0 and n % sigma == 0, f"example3 needs n divisible by sigma (n={n}, sigma={sigma})")
        rho = n // sigma
    _require(n == rho * sigma, f"example3 needs n = rho * sigma (n={n}, rho={rho}, sigma={sigma})")
    return list(range(1, sigma + 1)) * rho


def _example4(n, rho):
    rho = 1 if rho is None else rho
    _require(rho > 0 and n % rho == 0, f"example4 needs n divisible by rho (n={n}, rho={rho})")
    size = n // rho
    out: List[int] = []
    for k in range(rho - 1, -1, -1):
        out.extend(range(k * size + 1, (k + 1) * size + 1))
    return out


def _random_values(n, sigma, rho, phi, rng):
    pieces = (phi or 0) + 1
    _require(pieces <= max(n, 1), f"random needs phi < n (n={n}, phi={phi})")
    out: List[int] = []
    bounds = [n * k // pieces for k in range(pieces + 1)]
    top = sigma if sigma is not None else n
    for k in range(pieces):
        size = bounds[k + 1] - bounds[k]
        # value range of piece k, so that every cut is a pivot position
        lo = 1 + top * k // pieces
        hi = max(lo, top * (k + 1) // pieces)
        if sigma is None:
            vals = list(range(bounds[k] + 1, bounds[k + 1] + 1))
            rng.shuffle(vals)
        else:
            vals = [rng.randint(lo, hi) for _ in range(size)]
        if rho is not None:
            chunks = max(1, min(size, round(rho / pieces) or 1))
            edges = [size * c // chunks for c in range(chunks + 1)]
            vals = [v for a, b in zip(edges, edges[1:]) for v in sorted(vals[a:b])]
        out.extend(vals)
    return out


def read_instance(path) -> List[int]:
    try:
        with open(path) as fh:
            return [int(line) for line in fh if line.strip()]
    except OSError as exc:
        raise OSError(f"cannot read instance file {path}: {exc.strerror}") from exc


def write_instance(values: Iterable[int], path) -> None:
    try:
        with open(path, "w") as fh:
            fh.writelines(f"{v}\n" for v in values)
    except OSError as exc:
        raise OSError(f"cannot write instance file {path}: {exc.strerror}") from exc


def gen_values(spec: InstanceSpec) -> List[int]:
    _require(spec.family in FAMILIES, f"unknown family {spec.family!r}; expected one of {FAMILIES}")
    n = spec.n
    _require(n >= 0, f"n must be non-negative (n={n})")
    if spec.family == "example1":
        _require(n % 2 == 0, f"example1 needs an even n (n={n})")
        return [1, 2] * (n // 2)
    if spec.family == "example2":
        return list(range(1, n + 1))
    if spec.family == "example3":
        return _example3(n, spec.sigma, spec.rho)
    if spec.family == "example4":
        return _example4(n, spec.rho)
    if spec.family == "file":
        _require(spec.path is not None, "file family needs a path")
        return read_instance(spec.path)
    _require(spec.sigma is None or spec.sigma >= 1, f"sigma must be positive (sigma={spec.sigma})")
    return _random_values(n, spec.sigma, spec.rho, spec.phi, random.Random(spec.seed))


def gen_instance(spec: InstanceSpec) -> InstrumentedArray:
    return InstrumentedArray(gen_values(spec))


# -- queries


@dataclass(frozen=True)
class QuerySpec:
    """Which ranks to ask for and in what order.

    ``kind`` is ``select``, ``rank`` or ``mixed`` (each query is a rank query
    with probability ``p``). Rank queries ask for the value held at the
    generated rank.
    """

    profile: str = "uniform"
    q: int = 1
    clusters: int = 1
    order: str = "sorted"
    kind: str = "select"
    p: float = 0.5
    seed: int = 0

    def label(self) -> str:
        shape = {"uniform": f"uniform:{self.q}", "single": "single", "all": "all",
                 "clustered": f"clustered:{self.clusters}:{self.q}"}[self.profile]
        kind = self.kind if self.kind != "mixed" else f"mixed{self.p:g}"
        return f"{kind}/{shape}/{self.order}"

    @classmethod
    def parse(cls, text: str, **overrides) -> "QuerySpec":
        """``uniform:Q``, ``single``, ``all`` or ``clustered:K:Q``."""
        parts = text.split(":")
        try:
            if parts[0] == "uniform" and len(parts) == 2:
                spec = cls("uniform", int(parts[1]))
            elif parts[0] in ("single", "all") and len(parts) == 1:
                spec = cls(parts[0])
            elif parts[0] == "clustered" and len(parts) == 3:
                spec = cls("clustered", int(parts[2]), int(parts[1]))
            else:
                raise ValueError
        except ValueError:
            raise ValueError(f"bad query spec {text!r}; expected uniform:Q, single, all or clustered:K:Q") from None
        return replace(spec, **overrides)


def _uniform(n, q):
    return [-(-i * n // (q + 1)) for i in range(1, q + 1)]


def query_ranks(spec: QuerySpec, n: int) -> List[int]:
    """Distinct ranks in ``[1, n]`` in ascending order."""
    _require(spec.profile in PROFILES, f"unknown gap profile {spec.profile!r}")
    if n == 0:
        return []
    if spec.profile == "single":
        return [-(-n // 2)]
    if spec.profile == "all":
        return list(range(1, n + 1))
    _require(1 <= spec.q <= n, f"q must lie in [1, n] for distinct select ranks (q={spec.q}, n={n})")
    if spec.profile == "uniform":
        return _uniform(n, spec.q)
    k = spec.clusters
    _require(1 <= k <= spec.q, f"clusters must lie in [1, q] (clusters={k}, q={spec.q})")
    ranks = set()
    for c, centre in enumerate(_uniform(n, k)):
        size = spec.q // k + (1 if c < spec.q % k else 0)
        first = min(max(1, centre - size // 2), n - size + 1)
        ranks.update(range(first, first + size))
    # neighbouring clusters may overlap at small n; top up from the left
    r = 1
    while len(ranks) < spec.q:
        ranks.add(r)
        r += 1
    return sorted(ranks)


def order_ranks(ranks: Sequence[int], order: str, seed: int = 0) -> List[int]:
    _require(order in ORDERS, f"unknown query order {order!r}; expected one of {ORDERS}")
    rs = sorted(ranks)
    if order == "sorted":
        return rs
    if order == "reverse":
        return rs[::-1]
    if order == "random":
        random.Random(seed).shuffle(rs)
        return rs
    out = []
    lo, hi = 0, len(rs) - 1
    while lo <= hi:
        out.append(rs[lo])
        if hi != lo:
            out.append(rs[hi])
        lo, hi = lo + 1, hi - 1
    return out


Query = Tuple[str, int]


def gen_queries(spec: QuerySpec, values: Sequence[int]) -> List[Query]:
    """An online trace of ``("S", i)`` and ``("R", x)`` queries."""
    ranks = order_ranks(query_ranks(spec, len(values)), spec.order, spec.seed)
    if spec.kind == "select":
        return [("S", r) for r in ranks]
    _require(spec.kind in ("rank", "mixed"), f"unknown query kind {spec.kind!r}")
    srt = sorted(values)
    rng = random.Random(spec.seed + 1)
    out = []
    for r in ranks:
        as_rank = spec.kind == "rank" or rng.random() < spec.p
        out.append(("R", srt[r - 1]) if as_rank else ("S", r))
    return out


def format_trace(queries: Iterable[Query]) -> str:
    return "".join(f"{op} {arg}\n" for op, arg in queries)


def parse_trace(text: str) -> List[Query]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        op, _, arg = line.strip().partition(" ")
        if op not in ("S", "R") or not arg.strip().lstrip("-").isdigit():
            raise ValueError(f"trace line {lineno}: expected 'S <i>' or 'R <x>', got {line!r}")
        out.append((op, int(arg)))
    return out


def read_trace(path) -> List[Query]:
    try:
        return parse_trace(Path(path).read_text())
    except OSError as exc:
        raise OSError(f"cannot read trace file {path}: {exc.strerror}") from exc


def trace_checksum(queries: Iterable[Query]) -> str:
    return hashlib.sha256(format_trace(queries).encode()).hexdigest()[:12]


# -- oracles (uncounted)


def oracle_sort(values) -> list:
    return sorted(values)


def oracle_select(values, i: int):
    _require(1 <= i <= len(values), f"select rank {i} outside [1, {len(values)}]")
    return sorted(values)[i - 1]


def oracle_rank(values, x) -> int:
    return bisect.bisect_left(sorted(values), x)


def oracle_blocks(values):
    return block_decomposition(values)


def oracle_answers(values, queries: Sequence[Query]) -> list:
    srt = sorted(values)
    return [srt[arg - 1] if op == "S" else bisect.bisect_left(srt, arg) for op, arg in queries]


# -- algorithms


SORTERS = {
    "merge_sort_counters": lambda a: merge_sort_counters(a).expand(),
    "minimal_merge_sort": minimal_merge_sort,
    "small_vs_small_sort": lambda a: small_vs_small_sort(a).expand(),
    "parallel_race": lambda a: parallel_race(a).output,
    "quick_synergy_sort": lambda a: quick_synergy_sort(a).output,
    "global_sort": lambda a: global_sort(a).output,
    "dlm_sort": lambda a: dlm_sort(a).output,
}
MULTISELECTORS = {"multiselect": multiselect, "multiselect_with_global": multiselect_with_global}
DEFERRED = {"ram_deferred": RamDeferred, "finger_deferred": FingerDeferred}
SUCCINCT = {"rank_aware": build_rank_aware, "select_aware": build_select_aware}
ALGORITHMS = (*SORTERS, *MULTISELECTORS, *DEFERRED, *SUCCINCT)


def is_query_algorithm(name: str) -> bool:
    return name not in SORTERS


def replay(structure, queries: Sequence[Query]) -> list:
    return [structure.select(arg) if op == "S" else structure.rank(arg) for op, arg in queries]


def run_algorithm(name: str, values: Sequence, queries: Sequence[Query] = ()) -> Tuple[CostReport, bool]:
    """Run one algorithm on a fresh counted copy; returns its report and whether it matched the oracle."""
    a = InstrumentedArray(values)
    if name in SORTERS:
        out = SORTERS[name](a)
        return CostReport(name, a.comparisons), out == oracle_sort(values)
    expected = oracle_answers(values, queries)
    if name in MULTISELECTORS:
        if any(op != "S" for op, _ in queries):
            raise ValueError(f"{name} answers select queries only")
        res = MULTISELECTORS[name](a, [arg for _, arg in queries])
        return CostReport(name, a.comparisons), res.answers == expected
    if name in DEFERRED:
        ds = DEFERRED[name](a)
        got = replay(ds, queries)
        return CostReport(name, ds.comparisons, ds.index_steps), got == expected
    if name in SUCCINCT:
        cds = SUCCINCT[name](values)
        got = [values[cds.cds_select(arg)] if op == "S" else cds.rank_value(arg) for op, arg in queries]
        return CostReport(name, 0), got == expected
    raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")


# -- bench


@dataclass(frozen=True)
class BenchCell:
    instance: InstanceSpec
    algorithm: str
    queries: Optional[QuerySpec] = None
    trace: Optional[Tuple[Query, ...]] = None


@dataclass
class BenchRow:
    family: str
    n: int
    sigma: int
    rho: int
    phi: int
    delta: int
    chi: int
    algorithm: str
    qspec: str
    comparisons: int
    index_steps: int
    wall_ns: int
    pred_ms: float
    pred_tk: float
    pred_syn: float
    pred_env: Optional[float]
    verified: bool = True

    def csv_fields(self) -> list:
        env = "" if self.pred_env is None else f"{self.pred_env:.3f}"
        return [self.family, self.n, self.sigma, self.rho, self.phi, self.delta, self.chi,
                self.algorithm, self.qspec, self.comparisons, self.index_steps, self.wall_ns,
                f"{self.pred_ms:.3f}", f"{self.pred_tk:.3f}", f"{self.pred_syn:.3f}", env]


def run_cell(cell: BenchCell) -> BenchRow:
    values = gen_values(cell.instance)
    prof = instance_profile(values)
    queries: Sequence[Query] = ()
    qlabel = "-"
    env = None
    if cell.trace is not None:
        queries = cell.trace
        qlabel = f"trace:{trace_checksum(queries)}"
    elif cell.queries is not None and is_query_algorithm(cell.algorithm):
        queries = gen_queries(cell.queries, values)
        qlabel = cell.queries.label()
    if is_query_algorithm(cell.algorithm) and values:
        select_ranks = [arg for op, arg in queries if op == "S"]
        env = predictor_envelope(len(values), select_ranks)
    start = time.perf_counter_ns()
    report, ok = run_algorithm(cell.algorithm, values, queries)
    wall = time.perf_counter_ns() - start
    return BenchRow(cell.instance.label(), prof["n"], prof["sigma"], prof["rho"], prof["phi"],
                    prof["delta"], prof["chi"], cell.algorithm, qlabel, report.comparisons,
                    report.index_steps, wall, prof["munro_spira"], prof["takaoka"], prof["synergy"],
                    env, ok)


def bench_cells(instances: Sequence[InstanceSpec], algorithms: Sequence[str],
                query_specs: Sequence[QuerySpec] = (), trace: Optional[Sequence[Query]] = None,
                repetitions: int = 1) -> List[BenchCell]:
    """Cells in deterministic order: instance, then algorithm, then query spec, then repetition.

    Sorters get one cell per instance; query algorithms one per query spec
    (the trace, when given, replaces the specs; no spec means a single
    median query).
    """
    for name in algorithms:
        _require(name in ALGORITHMS, f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")
    cells = []
    frozen = tuple(trace) if trace is not None else None
    for inst in instances:
        for name in algorithms:
            if not is_query_algorithm(name):
                variants = [BenchCell(inst, name)]
            elif frozen is not None:
                variants = [BenchCell(inst, name, trace=frozen)]
            else:
                specs = query_specs or [QuerySpec("single")]
                variants = [BenchCell(inst, name, s) for s in specs
                            if not (name in MULTISELECTORS and s.kind != "select")]
            for cell in variants:
                cells.extend([cell] * repetitions)
    return cells


def worker_count(cells: int) -> int:
    cap = os.environ.get("SMS_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(limit, cells))


def bench_run(instances: Sequence[InstanceSpec], algorithms: Sequence[str],
              query_specs: Sequence[QuerySpec] = (), trace: Optional[Sequence[Query]] = None,
              repetitions: int = 1, out=None) -> Tuple[List[BenchRow], bool]:
    """Run every cell, write the CSV to ``out`` (a path or text stream), return rows and overall success."""
    cells = bench_cells(instances, algorithms, query_specs, trace, repetitions)
    workers = worker_count(len(cells))
    if workers == 1:
        rows = [run_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_cell, cells))
    if out is not None:
        write_csv(rows, out)
    return rows, all(r.verified for r in rows)


def write_csv(rows: Sequence[BenchRow], out) -> None:
    if isinstance(out, (str, Path)):
        try:
            with open(out, "w", newline="") as fh:
                write_csv(rows, fh)
        except OSError as exc:
            raise OSError(f"cannot write CSV {out}: {exc.strerror}") from exc
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(r.csv_fields())


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()
