"""Command-line entry point: ``python3 -m synergy <command> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import harness
from .core import InstrumentedArray
from .deferred import FingerDeferred, RamDeferred
from .measures import instance_profile, predictor_envelope
from .succinct import build_rank_aware, build_select_aware, deserialize, serialize, space_report


def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("instance and queries")
    g.add_argument("--family", default="random", help=f"one of {', '.join(harness.FAMILIES)}")
    g.add_argument("--n", type=int, default=1024)
    g.add_argument("--sigma", type=int)
    g.add_argument("--rho", type=int)
    g.add_argument("--phi", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--input", help="instance file (one integer per line); implies --family file")
    g.add_argument("--algo")
    g.add_argument("--queries", action="append",
                   help="uniform:Q, single, all or clustered:K:Q (repeatable for bench)")
    g.add_argument("--kind", default="select", choices=("select", "rank", "mixed"))
    g.add_argument("--order", default="sorted", choices=harness.ORDERS)
    g.add_argument("--out", help="output file (default: stdout)")


def _instance_spec(args, n=None) -> harness.InstanceSpec:
    family = "file" if args.input else args.family
    return harness.InstanceSpec(family, args.n if n is None else n, args.sigma, args.rho,
                                args.phi, args.seed, args.input)


def _query_specs(args) -> List[harness.QuerySpec]:
    return [harness.QuerySpec.parse(text, order=args.order, kind=args.kind, seed=args.seed)
            for text in (args.queries or [])]


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {out}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=str) + "\n"


def cmd_gen(args) -> int:
    values = harness.gen_values(_instance_spec(args))
    if args.queries:
        queries = harness.gen_queries(_query_specs(args)[0], values)
        _emit(harness.format_trace(queries), args.out)
    else:
        _emit("".join(f"{v}\n" for v in values), args.out)
    return 0


def cmd_sort(args) -> int:
    values = harness.gen_values(_instance_spec(args))
    algo = args.algo or "quick_synergy_sort"
    if algo not in harness.SORTERS:
        raise ValueError(f"unknown sorter {algo!r}; expected one of {tuple(harness.SORTERS)}")
    report, ok = harness.run_algorithm(algo, values)
    prof = instance_profile(values)
    report.descriptors = {k: prof[k] for k in ("n", "rho", "sigma", "delta", "chi", "phi")}
    report.predictors = {k: prof[k] for k in ("munro_spira", "takaoka", "synergy")}
    _emit(_dump({**report.as_dict(), "verified": ok}), args.out)
    return 0 if ok else 1


def _ranks(args, n) -> List[int]:
    if args.ranks:
        return [int(r) for r in args.ranks.split(",") if r.strip()]
    if args.ranks_file:
        try:
            return [int(line) for line in Path(args.ranks_file).read_text().split()]
        except OSError as exc:
            raise OSError(f"cannot read ranks file {args.ranks_file}: {exc.strerror}") from exc
    specs = _query_specs(args) or [harness.QuerySpec("single")]
    return harness.order_ranks(harness.query_ranks(specs[0], n), args.order, args.seed)


def cmd_multiselect(args) -> int:
    values = harness.gen_values(_instance_spec(args))
    algo = args.algo or "multiselect"
    if algo not in harness.MULTISELECTORS:
        raise ValueError(f"unknown multiselector {algo!r}; expected one of {tuple(harness.MULTISELECTORS)}")
    ranks = _ranks(args, len(values))
    a = InstrumentedArray(values)
    res = harness.MULTISELECTORS[algo](a, ranks)
    expected = [harness.oracle_select(values, r) for r in ranks] if values else []
    ok = res.answers == expected
    report = res.report.as_dict()
    report["predictors"] = {"envelope": predictor_envelope(len(values), ranks) if values else 0.0,
                            "multiselect": res.state.predictor(values)}
    _emit(_dump({**report, "ranks": ranks, "answers": res.answers, "verified": ok}), args.out)
    return 0 if ok else 1


def cmd_defer(args) -> int:
    values = harness.gen_values(_instance_spec(args))
    if args.trace:
        queries = harness.read_trace(args.trace)
    else:
        specs = _query_specs(args) or [harness.QuerySpec("single", kind=args.kind)]
        queries = harness.gen_queries(specs[0], values)
    kinds = {"ram": RamDeferred, "finger": FingerDeferred}
    algo = args.algo or "ram"
    if algo not in kinds:
        raise ValueError(f"unknown deferred structure {algo!r}; expected ram or finger")
    ds = kinds[algo](InstrumentedArray(values))
    answers = harness.replay(ds, queries)
    ok = answers == harness.oracle_answers(values, queries)
    out = ds.report().as_dict()
    out.update({"trace_checksum": harness.trace_checksum(queries), "queries": len(queries),
                "answers": answers, "verified": ok})
    _emit(_dump(out), args.out)
    return 0 if ok else 1


def cmd_succinct(args) -> int:
    if args.load:
        try:
            cds = deserialize(Path(args.load).read_bytes())
        except OSError as exc:
            raise OSError(f"cannot read {args.load}: {exc.strerror}") from exc
        values = None
    else:
        values = harness.gen_values(_instance_spec(args))
        builders = {"rank": build_rank_aware, "select": build_select_aware}
        algo = args.algo or "rank"
        if algo not in builders:
            raise ValueError(f"unknown compressed structure {algo!r}; expected rank or select")
        cds = builders[algo](values)
    rep = space_report(cds)
    out = {"structure": type(cds).__name__, "n": cds.n, "rho": cds.rho, "delta": cds.delta,
           "bits": rep.components, "total_bits": rep.total, "target_bits": rep.target,
           "ratio": rep.ratio}
    if args.serialize:
        data = serialize(cds)
        try:
            Path(args.serialize).write_bytes(data)
        except OSError as exc:
            raise OSError(f"cannot write {args.serialize}: {exc.strerror}") from exc
        out["serialized_bytes"] = len(data)
        out["round_trip_exact"] = serialize(deserialize(data)) == data
    if args.queries and cds.n:
        decoded = values if values is not None else cds.decode_original()
        queries = harness.gen_queries(_query_specs(args)[0], decoded)
        answers = [cds.cds_select(arg) if op == "S" else cds.rank_value(arg) for op, arg in queries]
        as_values = [decoded[x] if op == "S" else x for (op, _), x in zip(queries, answers)]
        out["answers"] = answers
        out["verified"] = as_values == harness.oracle_answers(decoded, queries)
    _emit(_dump(out), args.out)
    return 0 if out.get("verified", True) else 1


def cmd_bench(args) -> int:
    families = args.family.split(",")
    sizes = [int(x) for x in str(args.sizes or args.n).split(",")]
    instances = []
    for fam in families:
        for n in sizes:
            spec = _instance_spec(args, n)
            instances.append(harness.InstanceSpec(fam if not args.input else "file", n, spec.sigma,
                                                  spec.rho, spec.phi, spec.seed, spec.path))
    algos = [a for a in (args.algo if args.algo is not None else ",".join(harness.ALGORITHMS)).split(",") if a]
    trace = harness.read_trace(args.trace) if args.trace else None
    _, ok = harness.bench_run(instances, algos, _query_specs(args), trace, args.repetitions,
                              out=args.out or sys.stdout)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synergy", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("gen", help="emit an instance file (or a query trace with --queries)")
    _common(p)
    p.set_defaults(func=cmd_gen)
    p = sub.add_parser("sort", help="run one sorter and print its cost report")
    _common(p)
    p.set_defaults(func=cmd_sort)
    p = sub.add_parser("multiselect", help="answer a batch of select ranks")
    _common(p)
    p.add_argument("--ranks", help="comma-separated 1-based ranks")
    p.add_argument("--ranks-file", help="file of whitespace-separated ranks")
    p.set_defaults(func=cmd_multiselect)
    p = sub.add_parser("defer", help="replay an online trace against a deferred structure (--algo ram|finger)")
    _common(p)
    p.add_argument("--trace", help="trace file of 'S <i>' / 'R <x>' lines")
    p.set_defaults(func=cmd_defer)
    p = sub.add_parser("succinct", help="build a compressed structure (--algo rank|select), report space, query, serialize")
    _common(p)
    p.add_argument("--serialize", metavar="PATH", help="write the serialized structure to PATH")
    p.add_argument("--load", metavar="PATH", help="load a serialized structure instead of building one")
    p.set_defaults(func=cmd_succinct)
    p = sub.add_parser("bench", help="run the algorithm matrix and write CSV")
    _common(p)
    p.add_argument("--sizes", help="comma-separated n values (overrides --n)")
    p.add_argument("--trace", help="replay this trace for every query algorithm")
    p.add_argument("--repetitions", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
