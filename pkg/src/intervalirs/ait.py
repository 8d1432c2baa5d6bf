"""Augmented interval tree: uniform independent range sampling and range counting.

Each node also stores its whole subtree sorted both ways, so a query needs at
most one node where it straddles the center. There the two children are
finished with one binary search each instead of being traversed. The
overlapping intervals end up as a handful of contiguous runs (node records),
which are sampled through an alias table weighted by run length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

import numpy as np

from .errors import DuplicateId, InvalidSampleSize, NotFound, ValidationError
from .model import Dataset, Interval, QueryInterval
from .sampling import alias_sample_many, build_alias
from .tree import Node, build_nodes, count_le, count_lt, iter_nodes

_EMPTY = np.empty(0, dtype=np.int32)


class ListTag(IntEnum):
    LL = 0
    LR = 1
    ALR = 2
    ALL = 3
    POOL = 4


_ATTR = {ListTag.LL: "ll", ListTag.LR: "lr", ListTag.ALR: "ar", ListTag.ALL: "al"}


class NodeRecord(NamedTuple):
    """A run ``idx_l..idx_r`` (1-based, inclusive) of one node list.

    Pool records have ``node=None`` and carry the overlapping pool ids.
    """

    tag: ListTag
    node: Node | None
    idx_l: int
    idx_r: int
    pool: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.idx_r - self.idx_l + 1

    def items(self) -> np.ndarray:
        """The ids covered by this record."""
        if self.tag is ListTag.POOL:
            return self.pool[self.idx_l - 1:self.idx_r]
        return getattr(self.node, _ATTR[self.tag])[self.idx_l - 1:self.idx_r]


@dataclass
class QueryStats:
    visited: int = 0
    binary_searches: int = 0
    case3: int = 0


class RecordSet(list):
    """Node records of one query; ``total`` is the number of covered intervals."""

    @property
    def total(self) -> int:
        return sum(rec.size for rec in self)


class AugmentedTree:
    """Static part shared by the uniform and the weighted index."""

    def __init__(self, data: Dataset):
        self.coord = data.coord
        self._l = data.l.copy()
        self._r = data.r.copy()
        self._n = data.n
        self.root, self._height = build_nodes(self._l, self._r, np.arange(data.n), augmented=True)

    def __len__(self):
        return self._n

    @property
    def height(self) -> int:
        if self._height is None:
            self._height = max((d for _, d in iter_nodes(self.root)), default=0)
        return self._height

    def interval(self, i: int) -> Interval:
        return Interval(self._l[i].item(), self._r[i].item(), int(i))

    def nodes(self):
        return iter_nodes(self.root)

    def node_count(self) -> int:
        return sum(1 for _ in iter_nodes(self.root))

    def entry_count(self) -> int:
        """Total list entries (Ll + Lr + ALl + ALr over all nodes)."""
        return sum(len(u.ll) + len(u.lr) + len(u.al) + len(u.ar) for u, _ in iter_nodes(self.root))

    def augmented_entries(self) -> int:
        """Sum of |ALl| over all nodes."""
        return sum(len(u.al) for u, _ in iter_nodes(self.root))

    def _runs(self, ql, qr, stats: QueryStats | None = None) -> list:
        """Descend once; return ``(tag, node, start, stop)`` runs, 0-based half-open."""
        runs = []
        L, R = self._l, self._r
        u = self.root
        visited = searches = case3 = 0
        while u is not None:
            visited += 1
            c = u.center
            if qr < c:
                searches += 1
                j = count_le(u.ll, L, qr)
                if j:
                    runs.append((ListTag.LL, u, 0, j))
                u = u.left
            elif c < ql:
                searches += 1
                m = len(u.lr)
                j = count_lt(u.lr, R, ql)
                if j < m:
                    runs.append((ListTag.LR, u, j, m))
                u = u.right
            else:
                case3 += 1
                if len(u.ll):
                    runs.append((ListTag.LL, u, 0, len(u.ll)))
                k = u.left
                if k is not None:
                    visited += 1
                    searches += 1
                    m = len(k.ar)
                    j = count_lt(k.ar, R, ql)
                    if j < m:
                        runs.append((ListTag.ALR, k, j, m))
                k = u.right
                if k is not None:
                    visited += 1
                    searches += 1
                    j = count_le(k.al, L, qr)
                    if j:
                        runs.append((ListTag.ALL, k, 0, j))
                break
        if stats is not None:
            stats.visited += visited
            stats.binary_searches += searches
            stats.case3 += case3
        return runs

    def candidates(self, q: QueryInterval, stats: QueryStats | None = None) -> list:
        """Candidate phase: the overlapping runs as ``(tag, node, start, stop)``."""
        return self._runs(q.l, q.r, stats)

    def query_records(self, q: QueryInterval, stats: QueryStats | None = None) -> RecordSet:
        return RecordSet(
            NodeRecord(tag, node, a + 1, b) for tag, node, a, b in self._runs(q.l, q.r, stats)
        )

    def range_count(self, q: QueryInterval, stats: QueryStats | None = None) -> int:
        return sum(b - a for _, _, a, b in self._runs(q.l, q.r, stats))


def _insert_sorted(arr: np.ndarray, keys: np.ndarray, i: int, key) -> np.ndarray:
    return np.insert(arr, count_le(arr, keys, key), i)


def _merge_sorted(arr: np.ndarray, keys: np.ndarray, new: list[int]) -> np.ndarray:
    """Merge unsorted ``new`` ids into the key-sorted ``arr`` in one pass."""
    new = np.asarray(new, dtype=np.int32)
    new = new[np.argsort(keys[new], kind="stable")]
    pos = [count_le(arr, keys, keys[i]) for i in new]
    return np.insert(arr, pos, new)


def _remove_sorted(arr: np.ndarray, keys: np.ndarray, i: int, key) -> np.ndarray:
    lo = count_lt(arr, keys, key)
    hi = count_le(arr, keys, key)
    hit = np.flatnonzero(arr[lo:hi] == i)
    if hit.size == 0:
        raise NotFound(f"interval {i} missing from a node list")
    return np.delete(arr, lo + int(hit[0]))


def _leaf(i: int, center) -> Node:
    one = np.array([i], dtype=np.int32)
    return Node(center, one, one.copy(), one.copy(), one.copy())


def pool_capacity(n: int) -> int:
    return math.ceil(math.log2(n + 2)) ** 2


def rebuild_threshold(n: int) -> int:
    return 2 * math.ceil(math.log2(n + 1))


class AIT(AugmentedTree):
    """Augmented interval tree with uniform sampling and updates.

    Updates: :meth:`insert` (one at a time), :meth:`pool_insert` (buffered;
    the pool is flushed through :meth:`batch_insert` once it reaches
    ``ceil(log2(n+2))**2`` intervals) and :meth:`delete`. Pooled intervals
    take part in queries before they are flushed.
    """

    def __init__(self, data: Dataset):
        super().__init__(data)
        self._alive = np.ones(data.n, dtype=bool)
        self._pool: list[int] = []
        self.rebuilds = 0

    # -- queries -------------------------------------------------------------

    def _all_runs(self, ql, qr, stats=None) -> list:
        runs = self._runs(ql, qr, stats)
        if self._pool:
            pool = np.asarray(self._pool, dtype=np.int32)
            hit = pool[(self._l[pool] <= qr) & (ql <= self._r[pool])]
            if hit.size:
                runs.append((ListTag.POOL, hit, 0, hit.size))
        return runs

    def candidates(self, q: QueryInterval, stats: QueryStats | None = None) -> list:
        return self._all_runs(q.l, q.r, stats)

    def query_records(self, q: QueryInterval, stats: QueryStats | None = None) -> RecordSet:
        out = RecordSet()
        for tag, node, a, b in self._all_runs(q.l, q.r, stats):
            if tag is ListTag.POOL:
                out.append(NodeRecord(tag, None, a + 1, b, node))
            else:
                out.append(NodeRecord(tag, node, a + 1, b))
        return out

    def range_count(self, q: QueryInterval, stats: QueryStats | None = None) -> int:
        return sum(b - a for _, _, a, b in self._all_runs(q.l, q.r, stats))

    def sample_ids(self, q: QueryInterval, s: int, rng: np.random.Generator, stats: QueryStats | None = None) -> np.ndarray:
        """``s`` ids drawn uniformly (with replacement) from ``q`` ∩ X."""
        if s < 0:
            raise InvalidSampleSize(f"sample size {s} < 0")
        runs = self._all_runs(q.l, q.r, stats)
        if not runs or s == 0:
            return _EMPTY
        return sample_runs(runs, s, rng)

    def irs_sample(self, q: QueryInterval, s: int, rng: np.random.Generator) -> list[Interval]:
        return [self.interval(i) for i in self.sample_ids(q, s, rng)]

    # -- updates -------------------------------------------------------------

    def _reserve(self, i: int):
        if i < 0 or i >= 2**31 - 1:
            raise ValidationError(f"interval id {i} out of range")
        cap = len(self._l)
        if i >= cap:
            new = max(2 * cap, i + 1, 16)
            for name, fill in (("_l", 0), ("_r", 0), ("_alive", False)):
                old = getattr(self, name)
                grown = np.full(new, fill, dtype=old.dtype)
                grown[:cap] = old
                setattr(self, name, grown)

    def _register(self, x: Interval):
        if x.l > x.r:
            raise ValidationError(f"interval {x.id}: l > r")
        self._reserve(x.id)
        if self._alive[x.id]:
            raise DuplicateId(f"interval id {x.id} already present")
        self._l[x.id] = x.l
        self._r[x.id] = x.r
        self._alive[x.id] = True

    def contains(self, i: int) -> bool:
        return 0 <= i < len(self._alive) and bool(self._alive[i])

    def alive_ids(self) -> np.ndarray:
        return np.flatnonzero(self._alive)

    def insert(self, x: Interval) -> None:
        """Insert one interval, descending as a query for ``x`` would."""
        self._register(x)
        i = x.id
        L, R = self._l, self._r
        self._n += 1
        u = self.root
        if u is None:
            self.root = _leaf(i, x.l)
            self._height = 0
            return
        depth = 0
        while True:
            u.al = _insert_sorted(u.al, L, i, x.l)
            u.ar = _insert_sorted(u.ar, R, i, x.r)
            if x.r < u.center:
                if u.left is None:
                    u.left = _leaf(i, x.l)
                    depth += 1
                    break
                u = u.left
            elif u.center < x.l:
                if u.right is None:
                    u.right = _leaf(i, x.l)
                    depth += 1
                    break
                u = u.right
            else:
                u.ll = _insert_sorted(u.ll, L, i, x.l)
                u.lr = _insert_sorted(u.lr, R, i, x.r)
                break
            depth += 1
        self._after_growth(depth)

    def _after_growth(self, depth: int):
        self._height = max(self.height, depth)
        if depth > rebuild_threshold(self._n):
            self.rebuild()

    def rebuild(self) -> None:
        """Rebuild from scratch over every flushed (non-pooled) interval."""
        ids = self.alive_ids()
        if self._pool:
            ids = np.setdiff1d(ids, np.asarray(self._pool), assume_unique=True)
        self.root, self._height = build_nodes(self._l, self._r, ids, augmented=True)
        self.rebuilds += 1

    @property
    def pool(self) -> list[int]:
        return list(self._pool)

    @property
    def pool_capacity(self) -> int:
        return pool_capacity(self._n + len(self._pool))

    def pool_insert(self, x: Interval) -> None:
        """Buffer ``x``; the pool is flushed once it reaches capacity."""
        self._register(x)
        self._pool.append(x.id)
        if len(self._pool) >= self.pool_capacity:
            self.flush()

    def flush(self) -> None:
        if self._pool:
            pending, self._pool = self._pool, []
            self._batch(pending)

    def batch_insert(self, intervals) -> None:
        """Insert many intervals, touching each affected node list once."""
        ids = []
        for x in intervals:
            self._register(x)
            ids.append(x.id)
        self._batch(ids)

    def _batch(self, ids: list[int]) -> None:
        L, R = self._l, self._r
        marked: dict[int, tuple[Node, dict[str, list[int]]]] = {}

        def mark(node, name, i):
            entry = marked.get(id(node))
            if entry is None:
                entry = marked[id(node)] = (node, {"ll": [], "lr": [], "al": [], "ar": []})
            entry[1][name].append(i)

        def new_leaf(i):
            node = Node(L[i].item(), _EMPTY, _EMPTY, _EMPTY, _EMPTY)
            for name in ("ll", "lr", "al", "ar"):
                mark(node, name, i)
            return node

        deepest = 0
        for i in ids:
            self._n += 1
            xl, xr = L[i], R[i]
            u = self.root
            if u is None:
                self.root = new_leaf(i)
                continue
            depth = 0
            while True:
                mark(u, "al", i)
                mark(u, "ar", i)
                if xr < u.center:
                    if u.left is None:
                        u.left = new_leaf(i)
                        depth += 1
                        break
                    u = u.left
                elif u.center < xl:
                    if u.right is None:
                        u.right = new_leaf(i)
                        depth += 1
                        break
                    u = u.right
                else:
                    mark(u, "ll", i)
                    mark(u, "lr", i)
                    break
                depth += 1
            deepest = max(deepest, depth)
        for node, lists in marked.values():
            for name, new in lists.items():
                if new:
                    keys = L if name in ("ll", "al") else R
                    setattr(node, name, _merge_sorted(getattr(node, name), keys, new))
        self._after_growth(deepest)

    def delete(self, i: int) -> None:
        """Remove interval ``i`` from its node and from every ancestor's augmented lists."""
        if not self.contains(i):
            raise NotFound(f"interval id {i} not present")
        if i in self._pool:
            self._pool.remove(i)
            self._alive[i] = False
            return
        L, R = self._l, self._r
        xl, xr = L[i], R[i]
        path = []
        u = self.root
        while u is not None:
            path.append(u)
            if xr < u.center:
                u = u.left
            elif u.center < xl:
                u = u.right
            else:
                break
        owner = path[-1] if path else None
        if owner is None or not (owner.center >= xl and owner.center <= xr):
            raise NotFound(f"interval id {i} not reachable in the tree")
        owner.ll = _remove_sorted(owner.ll, L, i, xl)
        owner.lr = _remove_sorted(owner.lr, R, i, xr)
        for node in path:
            node.al = _remove_sorted(node.al, L, i, xl)
            node.ar = _remove_sorted(node.ar, R, i, xr)
        for k in range(len(path) - 1, -1, -1):
            node = path[k]
            if len(node.al):
                break
            if k == 0:
                self.root = None
            elif path[k - 1].left is node:
                path[k - 1].left = None
            else:
                path[k - 1].right = None
        self._alive[i] = False
        self._n -= 1
        self._height = None


def sample_runs(runs: list, s: int, rng: np.random.Generator, table=None) -> np.ndarray:
    """Draw ``s`` ids: pick a run by alias over run lengths, then a uniform slot in it."""
    sizes = np.asarray([b - a for _, _, a, b in runs])
    if table is None:
        table = build_alias(sizes.tolist())
    which = alias_sample_many(table, s, rng)
    offset = rng.integers(0, sizes[which])
    out = np.empty(s, dtype=np.int32)
    for k, (tag, node, a, b) in enumerate(runs):
        pick = np.flatnonzero(which == k)
        if pick.size:
            arr = node if tag is ListTag.POOL else getattr(node, _ATTR[tag])
            out[pick] = arr[a + offset[pick]]
    return out


def build_ait(data: Dataset) -> AIT:
    return AIT(data)
