"""Synthetic datasets and query workloads.

Coordinates are integers on ``[domain_min, domain_max]``. Three length
shapes are offered:

``uniform-length``
    length ~ U{0, ..., 2m} with ``m = length_fraction * D``; analytic median ``m``.
``zipf-length``
    length = ``m * Z`` for ``Z`` ~ Zipf(``zipf_a``), capped at ``D``; heavy tailed.
``clustered``
    uniform lengths, left endpoints drawn from a few normal clusters.

Left endpoints are placed so every interval lies inside the domain.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ValidationError
from .model import Dataset, QueryInterval, QuerySpec, make_rng, save_dataset, save_queries

DISTRIBUTIONS = ("uniform-length", "zipf-length", "clustered")
DEFAULT_DOMAIN = (0, 10**8)


@dataclass
class DatasetStats:
    cardinality: int
    domain_min: int
    domain_max: int
    min_length: float
    median_length: float
    max_length: float

    def as_dict(self) -> dict:
        return asdict(self)


def dataset_stats(data: Dataset) -> DatasetStats:
    lengths = data.r - data.l
    if data.n:
        lo, med, hi = float(lengths.min()), float(np.median(lengths)), float(lengths.max())
    else:
        lo = med = hi = 0.0
    return DatasetStats(data.n, data.domain_min, data.domain_max, lo, med, hi)


def gen_dataset(n: int, distribution: str = "uniform-length", domain=DEFAULT_DOMAIN, seed: int | None = 0,
                length_fraction: float = 0.001, weighted: bool = False, zipf_a: float = 2.0,
                clusters: int = 16) -> Dataset:
    """Generate ``n`` intervals; deterministic for a fixed seed.

    ``weighted`` attaches integer weights drawn uniformly from ``[1, 100]``.
    """
    if n < 0:
        raise ValidationError(f"n = {n} < 0")
    if distribution not in DISTRIBUTIONS:
        raise ValidationError(f"unknown distribution {distribution!r}")
    dmin, dmax = int(domain[0]), int(domain[1])
    if dmin >= dmax:
        raise ValidationError("domain_min must be < domain_max")
    if not 0 < length_fraction <= 0.5:
        raise ValidationError("length_fraction must lie in (0, 0.5]")
    D = dmax - dmin
    m = max(1, int(round(length_fraction * D)))
    rng = make_rng(seed)

    if distribution == "zipf-length":
        z = rng.zipf(zipf_a, size=n).astype(np.float64)
        length = np.minimum(np.round(m * z / 2), D).astype(np.int64)
    else:
        length = rng.integers(0, 2 * m, size=n, endpoint=True)

    room = D - length
    if distribution == "clustered":
        centers = rng.uniform(0, 1, size=clusters)
        spread = 0.02
        c = centers[rng.integers(0, clusters, size=n)]
        frac = np.clip(rng.normal(c, spread), 0.0, 1.0)
        left = dmin + np.floor(frac * room).astype(np.int64)
    else:
        left = dmin + np.floor(rng.random(n) * (room + 1)).astype(np.int64)
    right = left + length
    weight = rng.integers(1, 100, size=n, endpoint=True).astype(np.float64) if weighted else None
    return Dataset(left, right, weight, dmin, dmax, "int")


def uniform_length_median(length_fraction: float, domain=DEFAULT_DOMAIN) -> float:
    """Analytic median of the ``uniform-length`` generator."""
    D = domain[1] - domain[0]
    return float(max(1, int(round(length_fraction * D))))


@dataclass
class QueryWorkload:
    queries: list[QuerySpec]
    extent_fraction: float
    domain_min: int
    domain_max: int
    seed: int | None
    clamped: int
    right_endpoint_policy: str = "clamp-to-domain-max"

    def metadata(self) -> dict:
        d = asdict(self)
        del d["queries"]
        d["count"] = len(self.queries)
        return d


def gen_queries(count: int, extent_fraction: float = 0.08, domain=DEFAULT_DOMAIN, seed: int | None = 0,
                s: int | None = None) -> QueryWorkload:
    """Uniform left endpoints; right = left + extent*D, clamped to ``domain_max``."""
    if count < 0:
        raise ValidationError(f"count = {count} < 0")
    if not 0 < extent_fraction <= 1:
        raise ValidationError("extent_fraction must lie in (0, 1]")
    dmin, dmax = int(domain[0]), int(domain[1])
    D = dmax - dmin
    ext = int(round(extent_fraction * D))
    rng = make_rng(seed)
    left = rng.integers(dmin, dmax, size=count, endpoint=True)
    raw = left + ext
    right = np.minimum(raw, dmax)
    queries = [QuerySpec(QueryInterval(int(a), int(b)), s) for a, b in zip(left.tolist(), right.tolist())]
    return QueryWorkload(queries, extent_fraction, dmin, dmax, seed, int(np.count_nonzero(raw > dmax)))


def expected_query_length(extent_fraction: float, domain=DEFAULT_DOMAIN) -> float:
    """Mean clamped query length for a uniform left endpoint: L - L²/(2D)."""
    D = domain[1] - domain[0]
    L = extent_fraction * D
    return L - L * L / (2 * D)


def write_dataset(data: Dataset, path) -> DatasetStats:
    save_dataset(data, path)
    return dataset_stats(data)


def write_queries(workload: QueryWorkload, path) -> dict:
    save_queries(workload.queries, path)
    return workload.metadata()

