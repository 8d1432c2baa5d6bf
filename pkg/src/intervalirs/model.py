"""Domain types shared by every index: intervals, datasets, queries and randomness.

Intervals are closed, so touching endpoints overlap. A dataset keeps its
coordinates in numpy arrays indexed by interval id (ids are ``0..n-1``); the
:class:`Interval` value type is what the public query APIs hand back.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DataFormatError, InvalidWeight, ValidationError

RNG_ALGORITHM = "numpy-PCG64"


@dataclass(frozen=True, slots=True)
class Interval:
    l: float
    r: float
    id: int = 0
    weight: float = 1.0
    pseudo: bool = False

    def __post_init__(self):
        if self.l > self.r:
            raise ValidationError(f"interval {self.id}: l={self.l} > r={self.r}")
        if not self.weight > 0:
            raise InvalidWeight(f"interval {self.id}: weight {self.weight} must be > 0")


@dataclass(frozen=True, slots=True)
class QueryInterval:
    l: float
    r: float

    def __post_init__(self):
        if self.l > self.r:
            raise ValidationError(f"query l={self.l} > r={self.r}")

    @classmethod
    def stabbing(cls, p) -> "QueryInterval":
        return cls(p, p)


def overlaps(a, b):
    """Closed-interval overlap test ``a.l <= b.r and b.l <= a.r``.

    Works elementwise when the endpoints are numpy arrays.
    """
    return (a.l <= b.r) & (b.l <= a.r)


def pair_sort(intervals: Iterable[Interval]) -> list[Interval]:
    """Sort by left endpoint, then right endpoint, then id."""
    return sorted(intervals, key=lambda x: (x.l, x.r, x.id))


def pair_sort_order(l: np.ndarray, r: np.ndarray, ids: np.ndarray | None = None) -> np.ndarray:
    """Positions that put ``(l, r, ids)`` in pair-sort order."""
    if ids is None:
        ids = np.arange(len(l))
    return np.lexsort((ids, r, l))


def make_rng(seed: int | None = None) -> np.random.Generator:
    """Seeded generator; equal seeds and call sequences give equal draws."""
    return np.random.Generator(np.random.PCG64(seed))


class Dataset:
    """A homogeneous set of intervals stored column-wise.

    ``coord`` is ``"int"`` (int64 endpoints) or ``"float"`` (float64).
    ``weight`` is None for unweighted data; :attr:`weights` then reads as ones.
    """

    def __init__(self, l, r, weight=None, domain_min=None, domain_max=None, coord=None):
        l = np.asarray(l)
        r = np.asarray(r)
        if coord is None:
            coord = "int" if np.issubdtype(l.dtype, np.integer) and np.issubdtype(r.dtype, np.integer) else "float"
        dtype = np.int64 if coord == "int" else np.float64
        self.coord = coord
        self.l = np.ascontiguousarray(l, dtype=dtype)
        self.r = np.ascontiguousarray(r, dtype=dtype)
        if self.l.shape != self.r.shape or self.l.ndim != 1:
            raise ValidationError("l and r must be 1-d arrays of equal length")
        bad = np.flatnonzero(self.l > self.r)
        if bad.size:
            i = int(bad[0])
            raise ValidationError(f"interval {i}: l={self.l[i]} > r={self.r[i]}")
        if weight is not None:
            weight = np.ascontiguousarray(weight, dtype=np.float64)
            if weight.shape != self.l.shape:
                raise ValidationError("weight length does not match interval count")
            if not np.all(weight > 0):
                i = int(np.flatnonzero(~(weight > 0))[0])
                raise InvalidWeight(f"interval {i}: weight {weight[i]} must be > 0")
        self.weight = weight
        n = len(self.l)
        self.domain_min = domain_min if domain_min is not None else (self.l.min().item() if n else 0)
        self.domain_max = domain_max if domain_max is not None else (self.r.max().item() if n else 0)
        if n and (self.l.min() < self.domain_min or self.r.max() > self.domain_max):
            raise ValidationError("interval endpoints fall outside the declared domain")

    @classmethod
    def from_intervals(cls, intervals: Sequence[Interval], weighted=None, **kw) -> "Dataset":
        """Build from Interval objects; ids are reassigned to list positions."""
        l = [x.l for x in intervals]
        r = [x.r for x in intervals]
        if weighted is None:
            weighted = any(x.weight != 1.0 for x in intervals)
        w = [x.weight for x in intervals] if weighted else None
        if "coord" not in kw:
            kw["coord"] = "int" if all(isinstance(v, (int, np.integer)) for v in l + r) else "float"
        return cls(l, r, w, **kw)

    def __len__(self):
        return len(self.l)

    @property
    def n(self) -> int:
        return len(self.l)

    @property
    def has_weights(self) -> bool:
        return self.weight is not None

    @property
    def weights(self) -> np.ndarray:
        return self.weight if self.weight is not None else np.ones(len(self.l))

    @property
    def ids(self) -> np.ndarray:
        return np.arange(len(self.l))

    def interval(self, i: int) -> Interval:
        w = 1.0 if self.weight is None else float(self.weight[i])
        return Interval(self.l[i].item(), self.r[i].item(), int(i), w)

    def __getitem__(self, i: int) -> Interval:
        return self.interval(i)

    def __iter__(self) -> Iterator[Interval]:
        for i in range(len(self.l)):
            yield self.interval(i)

    def subset(self, ids) -> "Dataset":
        ids = np.asarray(ids, dtype=np.int64)
        w = None if self.weight is None else self.weight[ids]
        return Dataset(self.l[ids], self.r[ids], w, self.domain_min, self.domain_max, self.coord)


# ---------------------------------------------------------------------------
# CSV I/O


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def _first_row(path):
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                return lineno, next(csv.reader([line]))
    return None, None


def _parse_rows(path, ncols_min, ncols_max):
    """Slow, line-numbered parser; skips a leading header row."""
    rows = []
    header = False
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or all(not c.strip() for c in row):
                continue
            if not rows and not header and not _is_number(row[0]):
                header = True
                continue
            if not ncols_min <= len(row) <= ncols_max:
                raise DataFormatError(path, lineno, f"expected {ncols_min}-{ncols_max} fields, got {len(row)}")
            try:
                vals = [float(c) for c in row[:2]] + [float(c) for c in row[2:] if c.strip()]
            except ValueError as e:
                raise DataFormatError(path, lineno, str(e)) from None
            if vals[0] > vals[1]:
                raise DataFormatError(path, lineno, f"l={row[0]} > r={row[1]}")
            rows.append((lineno, row))
    return rows


def _detect_coord(rows) -> str:
    for _, row in rows:
        for v in row[:2]:
            if not v.strip().lstrip("+-").isdigit():
                return "float"
    return "int"


def _load_fast(path, skip, coord):
    """numpy fast path; returns None when the slow parser must take over."""
    try:
        with open(path) as fh:
            ncols = len(fh.readline().split(","))
            if skip:
                ncols = len(fh.readline().split(","))
        if ncols not in (2, 3):
            return None
        dtype = np.int64 if coord == "int" else np.float64
        with warnings.catch_warnings():
            # int parsing of "1.5" only warns on some numpy versions
            warnings.simplefilter("error")
            lr = np.loadtxt(path, delimiter=",", skiprows=skip, usecols=(0, 1), dtype=dtype, ndmin=2)
            # a full parse rejects rows whose column count differs from the first
            full = np.loadtxt(path, delimiter=",", skiprows=skip, dtype=np.float64, ndmin=2)
    except (ValueError, IndexError, Warning):
        return None
    w = full[:, 2].copy() if ncols == 3 else None
    if np.any(lr[:, 0] > lr[:, 1]) or (w is not None and not np.all(w > 0)):
        return None
    return lr[:, 0].copy(), lr[:, 1].copy(), w


def load_dataset(path, coord: str = "auto", domain=None) -> Dataset:
    """Read ``l,r[,weight]`` lines; a non-numeric first line is a header.

    Rejects ``l > r`` with the offending line number.
    """
    path = str(path)
    lineno, first = _first_row(path)
    dmin, dmax = domain if domain is not None else (None, None)
    if first is None:
        return Dataset(np.empty(0, np.int64 if coord != "float" else np.float64),
                       np.empty(0, np.int64 if coord != "float" else np.float64), None, dmin, dmax)
    skip = lineno if not _is_number(first[0]) else lineno - 1
    if coord not in ("auto", "int", "float"):
        raise ValidationError(f"unknown coordinate type {coord!r}")
    fast = None
    if lineno == 1 or skip == lineno:
        for c in ([coord] if coord != "auto" else ["int", "float"]):
            fast = _load_fast(path, skip, c)
            if fast is not None:
                coord = c
                break
    if fast is not None:
        l, r, w = fast
        return Dataset(l, r, w, dmin, dmax, coord)

    rows = _parse_rows(path, 2, 3)
    if coord == "auto":
        coord = _detect_coord(rows)
    conv = (lambda v: int(float(v))) if coord == "int" else float
    l = np.array([conv(row[0]) for _, row in rows], dtype=np.int64 if coord == "int" else np.float64)
    r = np.array([conv(row[1]) for _, row in rows], dtype=l.dtype)
    w = None
    if any(len(row) == 3 for _, row in rows):
        w = np.empty(len(rows))
        for i, (lineno, row) in enumerate(rows):
            w[i] = float(row[2]) if len(row) == 3 and row[2].strip() else 1.0
            if not w[i] > 0:
                raise DataFormatError(path, lineno, f"weight {row[2]} must be > 0")
    return Dataset(l, r, w, dmin, dmax, coord)


def save_dataset(data: Dataset, path) -> None:
    fmt = "%d" if data.coord == "int" else "%.17g"
    with open(path, "w", newline="") as fh:
        if data.has_weights:
            fh.write("l,r,weight\n")
            cols = np.column_stack([data.l.astype(object), data.r.astype(object), data.weight.astype(object)])
            np.savetxt(fh, cols, fmt=[fmt, fmt, "%.17g"], delimiter=",")
        else:
            fh.write("l,r\n")
            if len(data):
                np.savetxt(fh, np.column_stack([data.l, data.r]), fmt=fmt, delimiter=",")


@dataclass(frozen=True)
class QuerySpec:
    q: QueryInterval
    s: int | None = None


def load_queries(path, coord: str = "auto") -> list[QuerySpec]:
    """Read ``l,r[,s]`` lines."""
    path = str(path)
    rows = _parse_rows(path, 2, 3)
    if coord == "auto":
        coord = _detect_coord(rows)
    conv = (lambda v: int(float(v))) if coord == "int" else float
    out = []
    for lineno, row in rows:
        s = None
        if len(row) == 3 and row[2].strip():
            try:
                s = int(row[2])
            except ValueError:
                raise DataFormatError(path, lineno, f"sample size {row[2]!r} is not an integer") from None
            if s < 0:
                raise DataFormatError(path, lineno, f"sample size {s} < 0")
        out.append(QuerySpec(QueryInterval(conv(row[0]), conv(row[1])), s))
    return out


def save_queries(queries: Sequence[QuerySpec], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        with_s = any(qs.s is not None for qs in queries)
        w.writerow(["l", "r", "s"] if with_s else ["l", "r"])
        for qs in queries:
            row = [_fmt(qs.q.l), _fmt(qs.q.r)]
            if with_s:
                row.append("" if qs.s is None else qs.s)
            w.writerow(row)


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))
