import numpy as np
import pytest

from intervalirs.model import Dataset, QueryInterval

LENGTH_MODES = ("points", "short", "long", "zipf", "mixed")


def random_dataset(rng, n, mode="mixed", domain=1000, weighted=False, integer=True):
    """Small random dataset; ``mode`` picks the length distribution."""
    if mode == "mixed":
        parts = np.array_split(np.arange(n), 4)
        modes = ["points", "short", "long", "zipf"]
        lengths = np.concatenate([_lengths(rng, len(p), m, domain) for p, m in zip(parts, modes)])
        rng.shuffle(lengths)
    else:
        lengths = _lengths(rng, n, mode, domain)
    if integer:
        left = rng.integers(0, domain - lengths + 1)
        right = left + lengths
        if n > 4:
            # force some exact duplicates and shared endpoints
            k = max(1, n // 20)
            src = rng.integers(0, n, size=k)
            dst = rng.integers(0, n, size=k)
            left[dst], right[dst] = left[src], right[src]
    else:
        left = rng.uniform(0, domain - lengths)
        right = left + lengths
    w = rng.integers(1, 10, size=n).astype(float) if weighted else None
    return Dataset(left, right, w, 0, domain)


def _lengths(rng, n, mode, domain):
    if mode == "points":
        return np.zeros(n, dtype=np.int64)
    if mode == "short":
        return rng.integers(0, max(2, domain // 100), size=n)
    if mode == "long":
        return rng.integers(domain // 10, domain // 2, size=n)
    if mode == "zipf":
        return np.minimum(rng.zipf(1.8, size=n), domain // 2)
    raise ValueError(mode)


def random_query(rng, domain=1000):
    """Mix of stabbing, short, long and out-of-domain queries."""
    kind = rng.integers(0, 4)
    a = int(rng.integers(-domain // 10, domain + domain // 10))
    if kind == 0:
        return QueryInterval(a, a)
    if kind == 1:
        return QueryInterval(a, a + int(rng.integers(0, domain // 50 + 1)))
    if kind == 2:
        return QueryInterval(a, a + int(rng.integers(0, domain)))
    b = int(rng.integers(-domain // 10, domain + domain // 10))
    return QueryInterval(min(a, b), max(a, b))


def covered_ids(records):
    """Concatenated ids of a RecordSet (keeps duplicates)."""
    parts = [rec.items() for rec in records]
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
