"""Edelsbrunner interval tree: the shared level-wise builder and the search baseline.

Node lists hold interval ids only (int32). Ordering keys are read from the
owning index's coordinate arrays, so binary searches go through
:func:`count_le` / :func:`count_lt` instead of a stored key array. This keeps
an augmented tree at four bytes per list entry.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Iterator

import numpy as np

from .errors import InvalidSampleSize
from .model import Dataset, Interval, QueryInterval

_SEG_SHIFT = 33
_RANK_MASK = (1 << _SEG_SHIFT) - 1
_EMPTY = np.empty(0, dtype=np.int32)


class Node:
    """One tree node.

    ``ll``/``lr`` hold the intervals stabbed by ``center`` sorted by left /
    right endpoint. ``al``/``ar`` (augmented trees only) hold every interval
    of the subtree, sorted the same way. The ``w*`` slots carry cumulative
    weights for the weighted tree.
    """

    __slots__ = ("center", "left", "right", "ll", "lr", "al", "ar", "wl", "wr", "awl", "awr")

    def __init__(self, center, ll, lr, al=None, ar=None):
        self.center = center
        self.left = None
        self.right = None
        self.ll = ll
        self.lr = lr
        self.al = al
        self.ar = ar
        self.wl = self.wr = self.awl = self.awr = None

    def __repr__(self):
        return f"Node(c={self.center}, |L|={len(self.ll)}, |AL|={None if self.al is None else len(self.al)})"


def count_le(ids: np.ndarray, keys: np.ndarray, x) -> int:
    """Number of leading entries of ``ids`` whose key is ``<= x`` (list sorted by key)."""
    return bisect_right(ids, x, key=keys.__getitem__)


def count_lt(ids: np.ndarray, keys: np.ndarray, x) -> int:
    """Number of leading entries of ``ids`` whose key is ``< x``."""
    return bisect_left(ids, x, key=keys.__getitem__)


def build_nodes(l: np.ndarray, r: np.ndarray, ids: np.ndarray, augmented: bool = True) -> tuple[Node | None, int]:
    """Build the tree over ``ids`` (coordinates read from ``l``/``r`` by id).

    The center of a node is the lower median of the endpoint multiset of the
    intervals routed to it. Levels are processed together with numpy: each
    level keeps the active intervals grouped by node in both left- and
    right-endpoint order, so the augmented lists come out already sorted.
    Returns ``(root, height)``; the height counts edges (a lone root has 0).
    """
    ids = np.asarray(ids, dtype=np.int64)
    n = ids.size
    if n == 0:
        return None, 0
    lv = l[ids]
    rv = r[ids]
    act_l = np.lexsort((ids, rv, lv))
    act_r = np.lexsort((ids, lv, rv))
    ends = np.concatenate((lv, rv))
    eorder = np.argsort(ends, kind="stable")
    erank = np.empty(2 * n, dtype=np.int64)
    erank[eorder] = np.arange(2 * n)
    sorted_ends = ends[eorder]
    del ends, eorder
    lrank = erank[:n]
    rrank = erank[n:]
    id32 = ids.astype(np.int32)

    seg_l = np.zeros(n, dtype=np.int64)
    seg_r = np.zeros(n, dtype=np.int64)
    parents: list[tuple[Node, bool] | None] = [None]
    root = None
    depth = -1
    while act_l.size:
        depth += 1
        nseg = len(parents)
        counts = np.bincount(seg_l, minlength=nseg)
        keys = np.concatenate(((seg_l << _SEG_SHIFT) | lrank[act_l], (seg_r << _SEG_SHIFT) | rrank[act_r]))
        keys.sort()
        starts = 2 * (np.cumsum(counts) - counts)
        centers = sorted_ends[keys[starts + counts - 1] & _RANK_MASK]
        del keys

        c = centers[seg_l]
        to_left_l = rv[act_l] < c
        to_right_l = lv[act_l] > c
        stay_l = ~(to_left_l | to_right_l)
        c = centers[seg_r]
        to_left_r = rv[act_r] < c
        to_right_r = lv[act_r] > c
        stay_r = ~(to_left_r | to_right_r)
        del c

        stay_counts = np.bincount(seg_l[stay_l], minlength=nseg)
        stay_off = np.concatenate(([0], np.cumsum(stay_counts)))
        ll_level = id32[act_l[stay_l]]
        lr_level = id32[act_r[stay_r]]
        if augmented:
            sub_off = np.concatenate(([0], np.cumsum(counts)))
            al_level = id32[act_l]
            ar_level = id32[act_r]

        nodes = []
        center_list = centers.tolist()
        so = stay_off.tolist()
        ao = sub_off.tolist() if augmented else None
        for s in range(nseg):
            a, b = so[s], so[s + 1]
            node = Node(center_list[s], ll_level[a:b], lr_level[a:b])
            if augmented:
                a2, b2 = ao[s], ao[s + 1]
                node.al = al_level[a2:b2]
                node.ar = ar_level[a2:b2]
            p = parents[s]
            if p is None:
                root = node
            elif p[1]:
                p[0].right = node
            else:
                p[0].left = node
            nodes.append(node)

        has_left = np.bincount(seg_l[to_left_l], minlength=nseg) > 0
        has_right = np.bincount(seg_l[to_right_l], minlength=nseg) > 0
        flags = np.stack((has_left, has_right), axis=1).ravel()
        labels = np.cumsum(flags) - 1
        left_label = labels[0::2]
        right_label = labels[1::2]
        parents = []
        for s, (hl, hr) in enumerate(zip(has_left.tolist(), has_right.tolist())):
            if hl:
                parents.append((nodes[s], False))
            if hr:
                parents.append((nodes[s], True))

        move = ~stay_l
        newseg = np.where(to_left_l, left_label[seg_l], right_label[seg_l])[move]
        order = np.argsort(newseg, kind="stable")
        act_l = act_l[move][order]
        seg_l = newseg[order]
        move = ~stay_r
        newseg = np.where(to_left_r, left_label[seg_r], right_label[seg_r])[move]
        order = np.argsort(newseg, kind="stable")
        act_r = act_r[move][order]
        seg_r = newseg[order]
    return root, depth


def iter_nodes(root: Node | None) -> Iterator[tuple[Node, int]]:
    """Pre-order walk yielding ``(node, depth)``."""
    if root is None:
        return
    stack = [(root, 0)]
    while stack:
        u, d = stack.pop()
        yield u, d
        if u.right is not None:
            stack.append((u.right, d + 1))
        if u.left is not None:
            stack.append((u.left, d + 1))


def tree_height(root: Node | None) -> int:
    return max((d for _, d in iter_nodes(root)), default=0)


class IntervalTree:
    """Plain interval tree over a static dataset (the search-then-sample baseline)."""

    def __init__(self, data: Dataset):
        self.data = data
        self._l = data.l
        self._r = data.r
        self.root, self.height = build_nodes(data.l, data.r, data.ids, augmented=False)

    def __len__(self):
        return self.data.n

    def node_count(self) -> int:
        return sum(1 for _ in iter_nodes(self.root))

    def entry_count(self) -> int:
        return sum(len(u.ll) + len(u.lr) for u, _ in iter_nodes(self.root))

    def stabbing_ids(self, p) -> np.ndarray:
        out = []
        u = self.root
        while u is not None:
            if p < u.center:
                out.append(u.ll[:count_le(u.ll, self._l, p)])
                u = u.left
            elif p > u.center:
                out.append(u.lr[count_lt(u.lr, self._r, p):])
                u = u.right
            else:
                out.append(u.ll)
                break
        return np.concatenate(out) if out else _EMPTY

    def stabbing_query(self, p) -> list[Interval]:
        return [self.data.interval(i) for i in self.stabbing_ids(p)]

    def range_ids(self, q: QueryInterval) -> np.ndarray:
        """Every id overlapping ``q`` by exhaustive traversal of unpruned subtrees."""
        out = []
        stack = [self.root] if self.root is not None else []
        ql, qr = q.l, q.r
        while stack:
            u = stack.pop()
            if qr < u.center:
                j = count_le(u.ll, self._l, qr)
                if j:
                    out.append(u.ll[:j])
                if u.left is not None:
                    stack.append(u.left)
            elif u.center < ql:
                j = count_lt(u.lr, self._r, ql)
                if j < len(u.lr):
                    out.append(u.lr[j:])
                if u.right is not None:
                    stack.append(u.right)
            else:
                out.append(u.ll)
                if u.left is not None:
                    stack.append(u.left)
                if u.right is not None:
                    stack.append(u.right)
        return np.concatenate(out) if out else _EMPTY

    def materialize(self, q: QueryInterval) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``q`` ∩ X copied out as columns ``(ids, l, r)``."""
        ids = self.range_ids(q)
        return ids, self._l[ids], self._r[ids]

    def candidates(self, q: QueryInterval, stats=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.materialize(q)

    def range_search(self, q: QueryInterval) -> list[Interval]:
        return [self.data.interval(i) for i in self.range_ids(q)]

    def range_count(self, q: QueryInterval) -> int:
        return int(self.range_ids(q).size)

    def sample_ids(self, q: QueryInterval, s: int, rng: np.random.Generator) -> np.ndarray:
        """Materialize ``q`` ∩ X, then draw ``s`` uniform samples with replacement."""
        if s < 0:
            raise InvalidSampleSize(f"sample size {s} < 0")
        found = self.materialize(q)[0]
        if s == 0 or found.size == 0:
            return _EMPTY
        return found[rng.integers(0, found.size, size=s)]

    def search_then_sample(self, q: QueryInterval, s: int, rng: np.random.Generator) -> list[Interval]:
        return [self.data.interval(i) for i in self.sample_ids(q, s, rng)]


def build_interval_tree(data: Dataset) -> IntervalTree:
    return IntervalTree(data)
