"""Benchmark harness: build an index, replay a query workload, report timings.

Every query is split into a candidate phase (finding node records, or
copying out the full result set for the plain interval tree) and a sampling
phase. Results are emitted as JSON-lines records: one per query and a final
aggregate.
Each query's generator is seeded from ``(seed, query index)``, so counts and
samples are reproducible; only timings vary between runs.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .ait import AIT, QueryStats, sample_runs
from .aitv import AITV, AITVStats
from .awit import AWIT
from .errors import DegenerateSelectivity, MissingWeights, ValidationError
from .model import RNG_ALGORITHM, Dataset, QueryInterval, QuerySpec
from .tree import IntervalTree
from .workload import gen_queries

INDEX_KINDS = ("itree", "ait", "aitv", "awit")


def build_index(kind: str, data: Dataset):
    if kind == "itree":
        return IntervalTree(data)
    if kind == "ait":
        return AIT(data)
    if kind == "aitv":
        return AITV(data)
    if kind == "awit":
        if not data.has_weights:
            raise MissingWeights("the weighted index needs a weight column")
        return AWIT(data)
    raise ValidationError(f"unknown index kind {kind!r}")


def timed_build(kind: str, data: Dataset):
    t0 = time.perf_counter()
    index = build_index(kind, data)
    return index, time.perf_counter() - t0


def query_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64([seed, k]))


def index_summary(kind: str, index, build_s: float | None = None) -> dict:
    out = {"index": kind, "n": len(index), "entries": index.entry_count()}
    if kind == "aitv":
        out.update(buckets=index.bucket_count, bucket_size=index.B,
                   nodes=index.vtree.node_count(), height=index.vtree.height)
    else:
        out.update(nodes=index.node_count(), height=index.height)
    if build_s is not None:
        out["build_s"] = build_s
    return out


def sample_once(kind: str, index, q: QueryInterval, s: int, rng: np.random.Generator):
    """Run one query; returns ``(ids, candidate_ns, sampling_ns, counters)``."""
    qs = QueryStats()
    t0 = time.perf_counter_ns()
    cand = index.candidates(q, qs)
    t1 = time.perf_counter_ns()
    counters = {"visited": qs.visited, "binary_searches": qs.binary_searches, "case3": qs.case3}
    if kind == "itree":
        found = cand[0]
        ids = found[rng.integers(0, found.size, size=s)] if found.size and s else found[:0]
        t2 = time.perf_counter_ns()
        counters = {"candidates": int(found.size)}
    elif kind == "ait":
        ids = sample_runs(cand, s, rng) if cand and s else np.empty(0, np.int32)
        t2 = time.perf_counter_ns()
    elif kind == "awit":
        ids = index.sample_from_runs(cand, s, rng)
        t2 = time.perf_counter_ns()
    else:
        st = AITVStats()
        try:
            ids = index.sample_from_runs(cand, q, s, rng, st)
        except DegenerateSelectivity:
            ids = None
        t2 = time.perf_counter_ns()
        counters.update(attempts=st.attempts, rejections=st.rejections, degenerate=ids is None)
        if ids is None:
            ids = np.empty(0, np.int32)
    if kind != "itree":
        counters["records"] = len(cand)
        counters["candidates"] = int(sum(b - a for _, _, a, b in cand))
    return ids, t1 - t0, t2 - t1, counters


def _digest(ids: np.ndarray) -> str:
    return hashlib.blake2b(np.ascontiguousarray(ids, dtype=np.int64).tobytes(), digest_size=8).hexdigest()


def _spread(values) -> dict:
    a = np.asarray(values, dtype=np.float64)
    if a.size == 0:
        return {"median": None, "mean": None, "min": None, "max": None}
    return {"median": float(np.median(a)), "mean": float(a.mean()), "min": float(a.min()), "max": float(a.max())}


@dataclass
class BenchConfig:
    index_kind: str = "ait"
    dataset_path: str | None = None
    query_path: str | None = None
    query_count: int = 1000
    extent_fraction: float = 0.08
    sample_size: int = 1000
    seed: int = 0
    repetitions: int = 1

    def __post_init__(self):
        if self.index_kind not in INDEX_KINDS:
            raise ValidationError(f"unknown index kind {self.index_kind!r}")
        if not 0 < self.extent_fraction <= 1:
            raise ValidationError("extent_fraction must lie in (0, 1]")
        if self.sample_size < 0:
            raise ValidationError("sample size must be >= 0")
        if self.repetitions < 1:
            raise ValidationError("repetitions must be >= 1")


@dataclass
class BenchResult:
    config: BenchConfig
    records: list[dict] = field(default_factory=list)

    @property
    def aggregate(self) -> dict:
        return self.records[-1]

    @property
    def per_query(self) -> list[dict]:
        return self.records[:-1]


def workload_for(config: BenchConfig, data: Dataset) -> list[QuerySpec]:
    w = gen_queries(config.query_count, config.extent_fraction, (data.domain_min, data.domain_max), config.seed)
    return w.queries


def run_bench(config: BenchConfig, data: Dataset, queries: list[QuerySpec] | None = None,
              index=None, build_s: float | None = None) -> BenchResult:
    """Replay ``queries`` (generated from the config when omitted) on a fresh or given index.

    Per-query timings are medians over ``repetitions``; a query's own ``s``
    overrides the configured sample size.
    """
    kind = config.index_kind
    if index is None:
        index, build_s = timed_build(kind, data)
    if queries is None:
        queries = workload_for(config, data)
    result = BenchResult(config)
    cand_all, samp_all, tot_all, attempts = [], [], [], []
    for k, qs in enumerate(queries):
        s = config.sample_size if qs.s is None else qs.s
        cts, sts = [], []
        for _ in range(config.repetitions):
            ids, c_ns, s_ns, counters = sample_once(kind, index, qs.q, s, query_rng(config.seed, k))
            cts.append(c_ns / 1000)
            sts.append(s_ns / 1000)
        tot = [c + t for c, t in zip(cts, sts)]
        rec = {"type": "query", "query": k, "l": qs.q.l, "r": qs.q.r, "s": s,
               "candidate_us": float(np.median(cts)), "sampling_us": float(np.median(sts)),
               "total_us": float(np.median(tot)), "total_us_min": min(tot), "total_us_max": max(tot),
               **counters, "samples": int(ids.size), "sample_digest": _digest(ids)}
        if kind != "aitv":
            rec["count"] = rec["candidates"]
        if "attempts" in counters:
            attempts.append(counters["attempts"])
        cand_all.append(rec["candidate_us"])
        samp_all.append(rec["sampling_us"])
        tot_all.append(rec["total_us"])
        result.records.append(rec)
    agg = {"type": "aggregate", **index_summary(kind, index, build_s), "queries": len(queries),
           "s": config.sample_size, "extent": config.extent_fraction, "repetitions": config.repetitions,
           "seed": config.seed, "rng": RNG_ALGORITHM,
           "candidate_us": _spread(cand_all), "sampling_us": _spread(samp_all), "total_us": _spread(tot_all)}
    if attempts:
        agg["attempts"] = _spread(attempts)
    result.records.append(agg)
    return result


def run_sweep(config: BenchConfig, data: Dataset, param: str, values, index=None) -> list[dict]:
    """Aggregate records for a sweep over ``extent`` or ``s`` on one built index."""
    if param not in ("extent", "s"):
        raise ValidationError(f"cannot sweep {param!r} in one process; sweep n by repeated invocation")
    build_s = None
    if index is None:
        index, build_s = timed_build(config.index_kind, data)
    out = []
    for v in values:
        kw = asdict(config)
        kw["extent_fraction" if param == "extent" else "sample_size"] = v
        agg = run_bench(BenchConfig(**kw), data, index=index, build_s=build_s).aggregate
        agg["sweep"] = param
        out.append(agg)
    return out


def run_count(kind: str, data: Dataset, queries: list[QuerySpec], index=None) -> list[int]:
    """``|q ∩ X|`` per query as reported by the chosen index."""
    if index is None:
        index = build_index(kind, data)
    return [int(index.range_count(qs.q)) for qs in queries]


UPDATE_MODES = ("one-by-one", "batch", "delete")


def run_update_bench(data: Dataset, insert_count: int = 5000, mode: str = "one-by-one", seed: int = 0,
                     verify_queries: int = 200) -> dict:
    """Amortized update cost on an AIT, verified against a fresh build.

    Insert modes build on the first ``n - insert_count`` intervals and add
    the rest; ``batch`` goes through the insertion pool. ``delete`` builds
    on everything and removes ``insert_count`` random ids.
    """
    if mode not in UPDATE_MODES:
        raise ValidationError(f"unknown update mode {mode!r}")
    n = data.n
    k = min(insert_count, n)
    if mode == "delete":
        tree = AIT(data)
        victims = np.random.default_rng(seed).choice(n, size=k, replace=False)
        t0 = time.perf_counter()
        for i in victims.tolist():
            tree.delete(i)
        elapsed = time.perf_counter() - t0
    else:
        tree = AIT(data.subset(np.arange(n - k)))
        new = [data.interval(i) for i in range(n - k, n)]
        t0 = time.perf_counter()
        if mode == "one-by-one":
            for x in new:
                tree.insert(x)
        else:
            for x in new:
                tree.pool_insert(x)
            tree.flush()
        elapsed = time.perf_counter() - t0
    alive = tree.alive_ids()
    mismatches = verify_against_fresh(tree, data, alive, verify_queries, seed)
    return {"type": "update", "mode": mode, "n": n, "ops": k, "total_s": elapsed,
            "amortized_ms": elapsed * 1000 / k if k else 0.0, "rebuilds": tree.rebuilds,
            "verified_queries": verify_queries, "mismatches": mismatches, "height": tree.height}


def verify_against_fresh(tree: AIT, data: Dataset, alive: np.ndarray, count: int, seed: int) -> int:
    """Queries on which ``tree`` disagrees with a fresh build over ``alive``."""
    fresh = AIT(data.subset(alive))
    w = gen_queries(count, 0.01, (data.domain_min, data.domain_max), seed)
    bad = 0
    for qs in w.queries:
        got = np.sort(np.concatenate([rec.items() for rec in tree.query_records(qs.q)] or [np.empty(0, np.int32)]))
        ref = fresh.query_records(qs.q)
        want = np.sort(alive[np.concatenate([rec.items() for rec in ref] or [np.empty(0, np.int32)])])
        if tree.range_count(qs.q) != fresh.range_count(qs.q) or not np.array_equal(got, want):
            bad += 1
    return bad


# ---------------------------------------------------------------------------
# JSON-lines


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def dump_jsonl(records, fh) -> None:
    for rec in records:
        fh.write(json.dumps(rec, default=_jsonable, sort_keys=True))
        fh.write("\n")


def read_jsonl(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
