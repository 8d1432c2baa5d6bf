"""Reference answers and statistical checks for the index structures.

The range oracle only applies :func:`~intervalirs.model.overlaps` to the raw
dataset columns; it never touches an index. The exact verifiers rebuild the
alias table over :class:`~fractions.Fraction` weights and sum the probability
of every (cell, threshold region, slot) outcome, so a correct sampler gives
exactly ``1/|q ∩ X|`` or ``w(x)/Σw`` with no rounding involved.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats as _stats

from .errors import ValidationError
from .model import Dataset, QueryInterval, overlaps
from .sampling import alias_distribution, build_alias


def oracle_range(data: Dataset, q: QueryInterval) -> np.ndarray:
    """Ids of every interval overlapping ``q``, ascending, by linear scan."""
    return np.flatnonzero(overlaps(q, data))


def oracle_count(data: Dataset, q: QueryInterval) -> int:
    return int(np.count_nonzero(overlaps(q, data)))


def oracle_weighted_pmf(data: Dataset, q: QueryInterval, exact: bool = False) -> dict:
    """``id -> w(x) / Σ w`` over ``q`` ∩ X; Fractions when ``exact``."""
    ids = oracle_range(data, q)
    if ids.size == 0:
        raise ValidationError("query overlaps no interval")
    w = data.weights[ids]
    if exact:
        fw = [Fraction(float(x)) for x in w]
        total = sum(fw)
        return {int(i): x / total for i, x in zip(ids, fw)}
    total = float(w.sum())
    return {int(i): float(x) / total for i, x in zip(ids, w)}


def oracle_uniform_pmf(data: Dataset, q: QueryInterval, exact: bool = False) -> dict:
    ids = oracle_range(data, q)
    if ids.size == 0:
        raise ValidationError("query overlaps no interval")
    p = Fraction(1, ids.size) if exact else 1.0 / ids.size
    return {int(i): p for i in ids}


# ---------------------------------------------------------------------------
# exact enumeration of the two-stage samplers


def exact_uniform_pmf(records) -> dict[int, Fraction]:
    """Exact per-id probability of one draw from the uniform record sampler.

    Alias mass of each record (over run lengths) times ``1/size`` per slot.
    """
    records = list(records)
    if not records:
        return {}
    table = build_alias([Fraction(rec.size) for rec in records])
    mass = alias_distribution(table)
    out: dict[int, Fraction] = Counter()
    for rec, m in zip(records, mass):
        for i in rec.items().tolist():
            out[i] += m / rec.size
    return dict(out)


def exact_weighted_pmf(awit, records) -> dict[int, Fraction]:
    """Exact per-id probability of one draw from the weighted record sampler.

    Record mass comes from an exact alias over prefix-difference weights; the
    within-record mass of slot ``k`` is ``(a[k] - a[k-1]) / (a[hi] - a[lo-1])``.
    Inputs must be integer weights (exact in float64).
    """
    records = list(records)
    if not records:
        return {}
    weights = [Fraction(awit.record_weight(rec)) for rec in records]
    mass = alias_distribution(build_alias(weights))
    out: dict[int, Fraction] = Counter()
    for rec, m, rw in zip(records, mass, weights):
        cum = awit.cumulative(rec)
        items = rec.items().tolist()
        for k, i in enumerate(items, start=rec.idx_l):
            prev = Fraction(float(cum[k - 2])) if k > 1 else Fraction(0)
            out[i] += m * (Fraction(float(cum[k - 1])) - prev) / rw
    return dict(out)


def exact_aitv_acceptance(aitv, q: QueryInterval) -> dict[int, Fraction]:
    """Exact probability that one attempt accepts each real interval.

    Conditional uniformity holds iff every value is the same and the keys
    are exactly ``q`` ∩ X.
    """
    records = aitv.vtree.query_records(q)
    vmass = exact_uniform_pmf(records)
    out: dict[int, Fraction] = Counter()
    data = aitv.data
    for k, pv in vmass.items():
        for i, p in zip(aitv.members[k].tolist(), aitv.pseudo[k].tolist()):
            if not p and data.l[i] <= q.r and q.l <= data.r[i]:
                out[i] += pv / aitv.B
    return dict(out)


# ---------------------------------------------------------------------------
# chi-square goodness of fit


@dataclass
class DistributionReport:
    support: list[int]
    expected: list[float]
    observed: list[int]
    chi_square: float
    draws: int

    def __post_init__(self):
        if abs(math.fsum(self.expected) - 1.0) > 1e-12:
            raise ValidationError("expected probabilities must sum to 1")
        if sum(self.observed) != self.draws:
            raise ValidationError("observed counts must sum to the number of draws")


def distribution_report(samples, pmf: dict) -> DistributionReport:
    """Tally ``samples`` against ``pmf``; any draw outside the support is an error."""
    samples = np.asarray(samples)
    support = sorted(pmf)
    pos = {k: j for j, k in enumerate(support)}
    observed = [0] * len(support)
    values, counts = np.unique(samples, return_counts=True)
    for v, c in zip(values.tolist(), counts.tolist()):
        if v not in pos:
            raise ValidationError(f"sampled id {v} is outside the support")
        observed[pos[v]] = c
    expected = [float(pmf[k]) for k in support]
    draws = int(samples.size)
    exp_counts = np.asarray(expected) * draws
    chi2 = float(((np.asarray(observed) - exp_counts) ** 2 / exp_counts).sum())
    return DistributionReport(support, expected, observed, chi2, draws)


def chi_square_test(report: DistributionReport, alpha: float = 0.001) -> tuple[bool, float]:
    """Pearson goodness of fit; passes iff the p-value is at least ``alpha``."""
    k = len(report.support)
    exp_counts = np.asarray(report.expected) * report.draws
    if report.draws < 10 * k or np.any(exp_counts < 5):
        raise ValidationError("too few draws for a chi-square test")
    if k == 1:
        return True, 1.0
    p = float(_stats.chi2.sf(report.chi_square, k - 1))
    return p >= alpha, p
