"""Augmented weighted interval tree: weight-proportional range sampling.

Every node list carries prefix sums of its weights, so the total weight of a
node record is one subtraction and a draw inside a record is a binary search
over the record's slice of the prefix array. No updates are offered.
"""

from __future__ import annotations

import numpy as np

from .ait import _ATTR, AugmentedTree, ListTag, NodeRecord, QueryStats
from .errors import InvalidSampleSize, InvalidWeight
from .model import Dataset, Interval, QueryInterval
from .sampling import alias_sample_many, build_alias, build_cumsum, cumsum_sample_range_many

_EMPTY = np.empty(0, dtype=np.int32)
_CUM = {ListTag.LL: "wl", ListTag.LR: "wr", ListTag.ALR: "awr", ListTag.ALL: "awl"}


class AWIT(AugmentedTree):
    """AIT whose four node lists each carry a cumulative-weight array.

    ``wl[j]`` is the weight of ``ll[0..j]``; likewise ``wr``/``lr``,
    ``awl``/``al`` and ``awr``/``ar``.
    """

    def __init__(self, data: Dataset):
        w = data.weights
        if not np.all(w > 0):
            raise InvalidWeight("all weights must be > 0")
        super().__init__(data)
        self._w = np.array(w, dtype=np.float64)
        for u, _ in self.nodes():
            u.wl = build_cumsum(self._w[u.ll])
            u.wr = build_cumsum(self._w[u.lr])
            u.awl = build_cumsum(self._w[u.al])
            u.awr = build_cumsum(self._w[u.ar])

    def interval(self, i: int) -> Interval:
        return Interval(self._l[i].item(), self._r[i].item(), int(i), float(self._w[i]))

    def entry_count(self) -> int:
        """List entries plus cumulative-array entries."""
        return 2 * super().entry_count()

    def _run_weight(self, tag, node, a, b) -> float:
        cum = getattr(node, _CUM[tag])
        return float(cum[b - 1] - (cum[a - 1] if a else 0.0))

    def record_weight(self, record: NodeRecord) -> float:
        """Total weight of the intervals a record covers (one prefix difference)."""
        return self._run_weight(record.tag, record.node, record.idx_l - 1, record.idx_r)

    def cumulative(self, record: NodeRecord) -> np.ndarray:
        return getattr(record.node, _CUM[record.tag])

    def sample_ids(self, q: QueryInterval, s: int, rng: np.random.Generator, stats: QueryStats | None = None) -> np.ndarray:
        """``s`` ids drawn with probability proportional to weight from ``q`` ∩ X."""
        if s < 0:
            raise InvalidSampleSize(f"sample size {s} < 0")
        return self.sample_from_runs(self._runs(q.l, q.r, stats), s, rng)

    def sample_from_runs(self, runs: list, s: int, rng: np.random.Generator) -> np.ndarray:
        """Sampling phase only: alias over run weights, prefix search inside a run."""
        if not runs or s == 0:
            return _EMPTY
        table = build_alias([self._run_weight(*run) for run in runs])
        which = alias_sample_many(table, s, rng)
        out = np.empty(s, dtype=np.int32)
        for k, (tag, node, a, b) in enumerate(runs):
            pick = np.flatnonzero(which == k)
            if pick.size:
                cum = getattr(node, _CUM[tag])
                idx = cumsum_sample_range_many(cum, a + 1, b, pick.size, rng)
                out[pick] = getattr(node, _ATTR[tag])[idx - 1]
        return out

    def weighted_irs_sample(self, q: QueryInterval, s: int, rng: np.random.Generator) -> list[Interval]:
        return [self.interval(i) for i in self.sample_ids(q, s, rng)]


def build_awit(data: Dataset) -> AWIT:
    return AWIT(data)
