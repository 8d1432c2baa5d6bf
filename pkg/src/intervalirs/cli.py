"""Command-line entry point: ``irs <subcommand> ...``.

Exit codes: 0 success, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import bench
from .errors import IRSError, ValidationError
from .model import RNG_ALGORITHM, QueryInterval, QuerySpec, load_dataset, load_queries
from .workload import DEFAULT_DOMAIN, DISTRIBUTIONS, gen_dataset, gen_queries, write_dataset, write_queries


EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_VALIDATION)


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _ints(text: str) -> list[int]:
    return [int(float(v)) for v in text.split(",") if v]


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    idx = argparse.ArgumentParser(add_help=False)
    idx.add_argument("--index", choices=bench.INDEX_KINDS, default="ait")
    idx.add_argument("--data", required=True, help="dataset CSV (l,r[,weight])")

    domain = argparse.ArgumentParser(add_help=False)
    domain.add_argument("--domain-min", type=int, default=DEFAULT_DOMAIN[0])
    domain.add_argument("--domain-max", type=int, default=DEFAULT_DOMAIN[1])

    p = _Parser(prog="irs", description="Independent range sampling on intervals.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-data", parents=[common, domain], help="generate a synthetic dataset")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--distribution", choices=DISTRIBUTIONS, default="uniform-length")
    g.add_argument("--length-fraction", type=float, default=0.001)
    g.add_argument("--weighted", action="store_true", help="add integer weights in [1, 100]")
    g.add_argument("--stats-out", help="where to write the stats block (default: stderr)")

    g = sub.add_parser("gen-queries", parents=[common, domain], help="generate a query workload")
    g.add_argument("--count", type=int, default=1000)
    g.add_argument("--extent", type=float, default=0.08)
    g.add_argument("--s", type=int, help="per-query sample size column")
    g.add_argument("--meta-out", help="where to write workload metadata (default: stderr)")

    sub.add_parser("build", parents=[common, idx], help="build an index and report its size")

    g = sub.add_parser("query", parents=[common, idx], help="draw samples for each query")
    g.add_argument("--queries", help="query CSV (l,r[,s])")
    g.add_argument("--q", nargs=2, type=float, metavar=("L", "R"), help="a single query interval")
    g.add_argument("--s", type=int, default=1000)

    g = sub.add_parser("count", parents=[common, idx], help="range count per query")
    g.add_argument("--queries", help="query CSV (l,r[,s])")
    g.add_argument("--q", nargs=2, type=float, metavar=("L", "R"))

    g = sub.add_parser("bench", parents=[common, idx], help="time candidate and sampling phases")
    g.add_argument("--queries", help="query CSV; generated from --count/--extent when omitted")
    g.add_argument("--count", type=int, default=1000)
    g.add_argument("--extent", type=float, default=0.08)
    g.add_argument("--s", type=int, default=1000)
    g.add_argument("--repetitions", type=int, default=1)
    g.add_argument("--sweep-extent", type=_floats, help="comma-separated extents; emits one aggregate each")
    g.add_argument("--sweep-s", type=_ints, help="comma-separated sample sizes; emits one aggregate each")

    g = sub.add_parser("update-bench", parents=[common], help="amortized AIT update cost")
    g.add_argument("--data", required=True)
    g.add_argument("--insert-count", type=int, default=5000)
    g.add_argument("--mode", choices=bench.UPDATE_MODES, default="one-by-one")
    g.add_argument("--verify-queries", type=int, default=200)
    return p


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def _emit(records: list[dict], args) -> None:
    fh = _open_out(args.out)
    try:
        if args.format == "json":
            bench.dump_jsonl(records, fh)
        else:
            keys = []
            for rec in records:
                keys += [k for k in rec if k not in keys]
            w = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
            w.writeheader()
            for rec in records:
                w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in rec.items()})
    finally:
        if fh is not sys.stdout:
            fh.close()


def _side(block: dict, path) -> None:
    if path:
        with open(path, "w") as fh:
            json.dump(block, fh, sort_keys=True)
            fh.write("\n")
    else:
        print(json.dumps(block, sort_keys=True), file=sys.stderr)


def _data(args):
    return load_dataset(args.data)


def _queries(args, data) -> list[QuerySpec]:
    if getattr(args, "q", None):
        lo, hi = args.q
        if data.coord == "int" and lo.is_integer() and hi.is_integer():
            lo, hi = int(lo), int(hi)
        return [QuerySpec(QueryInterval(lo, hi))]
    if not getattr(args, "queries", None):
        raise ValidationError("give --queries or --q")
    return load_queries(args.queries, coord=data.coord)


def cmd_gen_data(args) -> None:
    data = gen_dataset(args.n, args.distribution, (args.domain_min, args.domain_max), args.seed,
                       args.length_fraction, args.weighted)
    if not args.out:
        raise ValidationError("gen-data needs --out")
    stats = write_dataset(data, args.out)
    _side({"distribution": args.distribution, "seed": args.seed, **stats.as_dict()}, args.stats_out)


def cmd_gen_queries(args) -> None:
    w = gen_queries(args.count, args.extent, (args.domain_min, args.domain_max), args.seed, args.s)
    if not args.out:
        raise ValidationError("gen-queries needs --out")
    _side(write_queries(w, args.out), args.meta_out)


def cmd_build(args) -> None:
    data = _data(args)
    index, build_s = bench.timed_build(args.index, data)
    _emit([{"type": "build", **bench.index_summary(args.index, index, build_s)}], args)


def cmd_query(args) -> None:
    data = _data(args)
    queries = _queries(args, data)
    index = bench.build_index(args.index, data)
    records = []
    for k, qs in enumerate(queries):
        s = args.s if qs.s is None else qs.s
        ids, *_ = bench.sample_once(args.index, index, qs.q, s, bench.query_rng(args.seed, k))
        records.append({"query": k, "l": qs.q.l, "r": qs.q.r, "s": s, "seed": args.seed, "rng": RNG_ALGORITHM,
                        "samples": ids.tolist()})
    if args.format == "csv":
        records = [{"query": rec["query"], "id": i, "l": data.l[i].item(), "r": data.r[i].item()}
                   for rec in records for i in rec["samples"]]
    _emit(records, args)


def cmd_count(args) -> None:
    data = _data(args)
    queries = _queries(args, data)
    counts = bench.run_count(args.index, data, queries)
    _emit([{"query": k, "l": qs.q.l, "r": qs.q.r, "count": c} for k, (qs, c) in enumerate(zip(queries, counts))], args)


def cmd_bench(args) -> None:
    data = _data(args)
    cfg = bench.BenchConfig(args.index, args.data, args.queries, args.count, args.extent, args.s,
                            args.seed, args.repetitions)
    if args.sweep_extent or args.sweep_s:
        if args.queries:
            raise ValidationError("sweeps generate their own queries; drop --queries")
        index, build_s = bench.timed_build(args.index, data)
        records = []
        if args.sweep_extent:
            records += bench.run_sweep(cfg, data, "extent", args.sweep_extent, index)
        if args.sweep_s:
            records += bench.run_sweep(cfg, data, "s", args.sweep_s, index)
        for rec in records:
            rec["build_s"] = build_s
    else:
        queries = load_queries(args.queries, coord=data.coord) if args.queries else None
        records = bench.run_bench(cfg, data, queries).records
    _emit(records, args)


def cmd_update_bench(args) -> None:
    data = load_dataset(args.data)
    rec = bench.run_update_bench(data, args.insert_count, args.mode, args.seed, args.verify_queries)
    _emit([rec], args)


COMMANDS = {
    "gen-data": cmd_gen_data,
    "gen-queries": cmd_gen_queries,
    "build": cmd_build,
    "query": cmd_query,
    "count": cmd_count,
    "bench": cmd_bench,
    "update-bench": cmd_update_bench,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        COMMANDS[args.cmd](args)
    except ValidationError as e:
        print(f"irs: error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"irs: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except IRSError as e:
        print(f"irs: error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
