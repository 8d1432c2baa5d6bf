"""AIT over virtual intervals: linear space, rejection-based uniform sampling.

The pair-sorted dataset is cut into buckets of ``B = ceil(log2(n+2))`` slots.
Each bucket is represented by the smallest interval covering its members,
and an AIT indexes those virtual intervals. A draw picks a covering virtual
interval uniformly, then a uniform slot of its bucket, and keeps the member
only if it is real and overlaps the query.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ait import _ATTR, AIT, QueryStats, sample_runs
from .errors import DegenerateSelectivity, InvalidSampleSize
from .model import Dataset, Interval, QueryInterval, pair_sort_order
from .sampling import build_alias

_EMPTY = np.empty(0, dtype=np.int32)


def bucket_size(n: int) -> int:
    return max(1, math.ceil(math.log2(n + 2)))


@dataclass
class AITVStats:
    attempts: int = 0
    accepted: int = 0

    @property
    def rejections(self) -> int:
        return self.attempts - self.accepted


class AITV:
    """Buckets of pair-sorted intervals plus an AIT over their virtual intervals.

    ``members[k]`` lists the ``B`` slot ids of bucket ``k``; padding slots in
    the last bucket repeat its last real member and are flagged in
    ``pseudo``.
    """

    def __init__(self, data: Dataset):
        n = data.n
        self.data = data
        self.B = B = bucket_size(n)
        order = pair_sort_order(data.l, data.r).astype(np.int32)
        nb = -(-n // B)
        slots = np.empty(nb * B, dtype=np.int32)
        slots[:n] = order
        pseudo = np.zeros(nb * B, dtype=bool)
        if nb * B > n:
            slots[n:] = order[-1]
            pseudo[n:] = True
        self.members = slots.reshape(nb, B)
        self.pseudo = pseudo.reshape(nb, B)
        starts = np.arange(0, n, B)
        vl = data.l[order[starts]] if n else data.l[:0]
        vr = np.maximum.reduceat(data.r[order], starts) if n else data.r[:0]
        self.virtual = Dataset(vl, vr, None, data.domain_min, data.domain_max, data.coord)
        self.vtree = AIT(self.virtual)

    def __len__(self):
        return self.data.n

    @property
    def bucket_count(self) -> int:
        return len(self.members)

    def bucket(self, k: int) -> list[Interval]:
        out = []
        for i, p in zip(self.members[k].tolist(), self.pseudo[k].tolist()):
            x = self.data.interval(i)
            out.append(Interval(x.l, x.r, x.id, x.weight, pseudo=p))
        return out

    def virtual_interval(self, k: int) -> Interval:
        return self.virtual.interval(k)

    def entry_count(self) -> int:
        """Bucket slots plus every list entry of the virtual-interval AIT."""
        return self.members.size + self.vtree.entry_count()

    def range_count_upper(self, q: QueryInterval) -> int:
        """Number of buckets whose virtual interval overlaps ``q``."""
        return self.vtree.range_count(q)

    def candidates(self, q: QueryInterval, stats: QueryStats | None = None) -> list:
        """Runs of virtual intervals overlapping ``q``."""
        return self.vtree._runs(q.l, q.r, stats)

    def range_ids(self, q: QueryInterval) -> np.ndarray:
        """Exact ``q`` ∩ X by scanning the covered buckets."""
        runs = self.candidates(q)
        if not runs:
            return _EMPTY
        v = np.concatenate([getattr(node, _ATTR[tag])[a:b] for tag, node, a, b in runs])
        m = self.members[v][~self.pseudo[v]]
        return m[(self.data.l[m] <= q.r) & (q.l <= self.data.r[m])]

    def range_count(self, q: QueryInterval) -> int:
        return int(self.range_ids(q).size)

    def sample_ids(self, q: QueryInterval, s: int, rng: np.random.Generator,
                   stats: AITVStats | None = None, query_stats: QueryStats | None = None) -> np.ndarray:
        """``s`` ids drawn uniformly from ``q`` ∩ X by rejection.

        Gives up with :class:`DegenerateSelectivity` after ``4*s*B``
        consecutive rejections.
        """
        if s < 0:
            raise InvalidSampleSize(f"sample size {s} < 0")
        return self.sample_from_runs(self.vtree._runs(q.l, q.r, query_stats), q, s, rng, stats)

    def sample_from_runs(self, runs: list, q: QueryInterval, s: int, rng: np.random.Generator,
                         stats: AITVStats | None = None) -> np.ndarray:
        """Sampling phase only: rejection loop over the virtual-interval runs."""
        if not runs or s == 0:
            return _EMPTY
        table = build_alias([b - a for _, _, a, b in runs])
        l, r, B = self.data.l, self.data.r, self.B
        cap = 4 * s * B
        out = np.empty(s, dtype=np.int32)
        got = 0
        attempts = 0
        streak = 0
        while got < s:
            need = s - got
            batch = min(max(need + need // 8 + 16, 64), 1 << 20)
            v = sample_runs(runs, batch, rng, table)
            slot = rng.integers(0, B, size=batch)
            m = self.members[v, slot]
            ok = ~self.pseudo[v, slot] & (l[m] <= q.r) & (q.l <= r[m])
            acc = np.flatnonzero(ok)[:need]
            if acc.size:
                if streak + acc[0] >= cap or (acc.size > 1 and np.diff(acc).max() - 1 >= cap):
                    raise DegenerateSelectivity(f"{cap} consecutive rejections")
            done = acc.size == need
            used = int(acc[-1]) + 1 if done else batch
            streak = used - 1 - int(acc[-1]) if acc.size else streak + used
            attempts += used
            out[got:got + acc.size] = m[acc]
            got += acc.size
            if streak >= cap:
                raise DegenerateSelectivity(f"{cap} consecutive rejections")
        if stats is not None:
            stats.attempts += attempts
            stats.accepted += s
        return out

    def aitv_sample(self, q: QueryInterval, s: int, rng: np.random.Generator,
                    stats: AITVStats | None = None) -> list[Interval]:
        return [self.data.interval(i) for i in self.sample_ids(q, s, rng, stats)]


def build_aitv(data: Dataset) -> AITV:
    return AITV(data)
