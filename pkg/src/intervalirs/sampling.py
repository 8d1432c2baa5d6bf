"""Categorical sampling primitives: Walker's alias table and prefix-sum search.

Both work on arbitrary positive weights. The alias table is built with
generic arithmetic, so passing :class:`fractions.Fraction` weights yields an
exact table whose distribution can be enumerated without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Real
from typing import Sequence

import numpy as np

from .errors import EmptyWeights, InvalidWeight

_KAHAN_THRESHOLD = 10**6
_BLOCK = 4096


@dataclass
class AliasTable:
    """``n`` cells of capacity ``tau``; cell ``k`` holds at most two entries.

    ``first[k]``/``first_w[k]`` is the home entry of cell ``k``; ``second[k]``
    is the alias (``-1`` when the cell holds a single entry). Object indices
    are 0-based.
    """

    tau: Real
    first: list[int]
    first_w: list[Real]
    second: list[int]
    second_w: list[Real]
    _np: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.first)

    def cells(self) -> list[list[tuple[int, Real]]]:
        out = []
        for k in range(self.n):
            cell = [(self.first[k], self.first_w[k])]
            if self.second[k] >= 0:
                cell.append((self.second[k], self.second_w[k]))
            out.append(cell)
        return out

    def arrays(self):
        """(first, second, threshold, tau) as numpy arrays, cached."""
        if self._np is None:
            self._np = (
                np.asarray(self.first, dtype=np.int64),
                np.asarray(self.second, dtype=np.int64),
                np.asarray([float(w) for w in self.first_w]),
                float(self.tau),
            )
        return self._np


def _check_weights(weights):
    if len(weights) == 0:
        raise EmptyWeights("weights must be non-empty")
    for i, w in enumerate(weights):
        if not w > 0:
            raise InvalidWeight(f"weight {i} is {w}; weights must be > 0")


def build_alias(weights: Sequence[Real]) -> AliasTable:
    """Build an alias table with the two-worklist small/large pairing.

    Small objects (``w <= tau``) are seated in input order; each takes the
    first pending overweight object as its alias, and an overweight object
    whose residue drops to ``tau`` or below joins the small worklist.
    """
    weights = list(weights)
    _check_weights(weights)
    n = len(weights)
    total = sum(weights)
    tau = total / n
    first = list(range(n))
    first_w = [tau] * n
    second = [-1] * n
    second_w = [0] * n
    residue = list(weights)

    small = [i for i in range(n) if residue[i] <= tau]
    large = [i for i in range(n) if residue[i] > tau]
    si = li = 0
    while si < len(small) and li < len(large):
        i = small[si]
        si += 1
        j = large[li]
        first_w[i] = residue[i]
        gap = tau - residue[i]
        if gap > 0:
            second[i] = j
            second_w[i] = gap
            residue[j] -= gap
            if residue[j] <= tau:
                li += 1
                small.append(j)
    # Leftovers are exactly tau in exact arithmetic; float drift is absorbed here.
    for i in small[si:] + large[li:]:
        first_w[i] = tau
        second[i] = -1
        second_w[i] = 0
    return AliasTable(tau, first, first_w, second, second_w)


def alias_sample(table: AliasTable, rng: np.random.Generator) -> int:
    """One weighted draw: a uniform cell, then a uniform weight in ``[0, tau)``."""
    k = int(rng.integers(table.n))
    if table.second[k] < 0:
        return table.first[k]
    u = rng.random() * float(table.tau)
    return table.first[k] if u < table.first_w[k] else table.second[k]


def alias_sample_many(table: AliasTable, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent draws from ``table`` as an int64 array."""
    first, second, thresh, tau = table.arrays()
    k = rng.integers(0, len(first), size=size)
    u = rng.random(size) * tau
    return np.where(u < thresh[k], first[k], second[k])


def alias_distribution(table: AliasTable) -> list:
    """Exact per-object probability implied by the cells (enumerates every cell)."""
    n = table.n
    prob = [0] * n
    for k in range(n):
        prob[table.first[k]] += table.first_w[k] / table.tau / n
        if table.second[k] >= 0:
            prob[table.second[k]] += table.second_w[k] / table.tau / n
    return prob


# ---------------------------------------------------------------------------
# cumulative-sum method


def build_cumsum(weights) -> np.ndarray:
    """Prefix sums ``a[j] = w[0] + ... + w[j]`` (0-based storage of the 1-based array).

    Large float inputs are summed blockwise with an exactly rounded carry so
    drift stays bounded by a single block.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1:
        raise ValueError("weights must be 1-d")
    _check_positive_array(w)
    if w.size <= _KAHAN_THRESHOLD or _all_integral(w):
        return np.cumsum(w)
    out = np.empty_like(w)
    carry_parts: list[float] = []
    carry = 0.0
    for start in range(0, w.size, _BLOCK):
        block = w[start:start + _BLOCK]
        out[start:start + _BLOCK] = np.cumsum(block) + carry
        carry_parts.append(math.fsum(block))
        carry = math.fsum(carry_parts)
    return out


def _check_positive_array(w: np.ndarray):
    if w.size == 0:
        raise EmptyWeights("weights must be non-empty")
    if not np.all(w > 0):
        i = int(np.flatnonzero(~(w > 0))[0])
        raise InvalidWeight(f"weight {i} is {w[i]}; weights must be > 0")


def _all_integral(w: np.ndarray) -> bool:
    # Integer-valued partial sums are exact in float64 below 2**53.
    return bool(np.all(w == np.floor(w))) and float(w.sum()) < 2.0**53


def cumsum_sample_range(a: np.ndarray, lo: int, hi: int, rng: np.random.Generator) -> int:
    """Weighted draw of a 1-based index in ``[lo, hi]`` from prefix sums ``a``."""
    return int(cumsum_sample_range_many(a, lo, hi, 1, rng)[0])


def cumsum_sample_range_many(a: np.ndarray, lo: int, hi: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` draws of 1-based indices in ``[lo, hi]``.

    A weight ``w`` is drawn from ``(a[lo-1], a[hi]]`` and the answer is the
    ``k`` with ``a[k-1] < w <= a[k]``.
    """
    if not 1 <= lo <= hi <= len(a):
        raise IndexError(f"range [{lo}, {hi}] outside 1..{len(a)}")
    base = a[lo - 2] if lo > 1 else 0.0
    span = a[hi - 1] - base
    u = 1.0 - rng.random(size)  # (0, 1]
    w = base + u * span
    k = np.searchsorted(a[lo - 1:hi], w, side="left")
    np.clip(k, 0, hi - lo, out=k)
    return k + lo


def pick_weight(a: np.ndarray, w) -> np.ndarray:
    """The 1-based ``k`` with ``a[k-1] < w <= a[k]`` (deterministic helper)."""
    return np.searchsorted(a, w, side="left") + 1
