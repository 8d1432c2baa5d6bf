from fractions import Fraction

import numpy as np
import pytest

from conftest import random_dataset, random_query
from intervalirs.ait import AIT
from intervalirs.errors import ValidationError
from intervalirs.model import Dataset, QueryInterval
from intervalirs.oracle import (DistributionReport, chi_square_test, distribution_report, oracle_count, oracle_range,
                                oracle_uniform_pmf, oracle_weighted_pmf)
from intervalirs.tree import IntervalTree


class TestRangeOracle:
    def test_trivial(self):
        assert oracle_range(Dataset([], []), QueryInterval(0, 5)).size == 0
        d = Dataset([0, 3, 9], [1, 4, 9])
        np.testing.assert_array_equal(oracle_range(d, QueryInterval(-10**9, 10**9)), [0, 1, 2])
        assert oracle_count(d, QueryInterval(4, 8)) == 1

    def test_agrees_with_tree_search(self, rng):
        for _ in range(500):
            d = random_dataset(rng, int(rng.integers(0, 80)), domain=300)
            q = random_query(rng, 300)
            np.testing.assert_array_equal(oracle_range(d, q), np.sort(IntervalTree(d).range_ids(q)))


class TestPmf:
    def test_weighted(self):
        d = Dataset([0, 1, 2], [5, 5, 5], [1.0, 2.0, 3.0])
        assert oracle_weighted_pmf(d, QueryInterval(0, 5), exact=True) == {0: Fraction(1, 6), 1: Fraction(1, 3),
                                                                             2: Fraction(1, 2)}
        assert oracle_weighted_pmf(d, QueryInterval(0, 0)) == {0: 1.0}
        assert oracle_weighted_pmf(Dataset([0, 1], [5, 5], [4.0, 4.0]), QueryInterval(0, 9)) == {0: 0.5, 1: 0.5}
        with pytest.raises(ValidationError):
            oracle_weighted_pmf(d, QueryInterval(7, 8))

    def test_uniform(self):
        d = Dataset([0, 1, 2], [5, 5, 5])
        assert oracle_uniform_pmf(d, QueryInterval(2, 2), exact=True) == {i: Fraction(1, 3) for i in range(3)}


class TestChiSquare:
    def test_perfect_fit(self):
        r = DistributionReport([0, 1], [0.25, 0.75], [250, 750], 0.0, 1000)
        ok, p = chi_square_test(r)
        assert ok and p == 1.0
        r = distribution_report(np.repeat([0, 1], [250, 750]), {0: 0.25, 1: 0.75})
        assert r.chi_square == 0.0

    def test_missing_member_fails(self):
        r = distribution_report(np.zeros(10**4, dtype=int), {0: 0.5, 1: 0.5})
        ok, p = chi_square_test(r)
        assert not ok and p < 1e-10

    def test_preconditions(self):
        with pytest.raises(ValidationError):
            chi_square_test(distribution_report(np.arange(20) % 5, {i: 0.2 for i in range(5)}))
        with pytest.raises(ValidationError):
            distribution_report([7], {0: 1.0})
        with pytest.raises(ValidationError):
            DistributionReport([0], [0.5], [1], 0.0, 1)
        with pytest.raises(ValidationError):
            DistributionReport([0], [1.0], [2], 0.0, 1)

    def test_deterministic(self):
        r = distribution_report(np.arange(1000) % 4, {i: 0.25 for i in range(4)})
        assert chi_square_test(r) == chi_square_test(r)

    def test_calibration(self):
        """The AIT sampler over 50 intervals passes at alpha=0.001 for >= 99 of 100 seeds."""
        d = Dataset(np.arange(50) * 3, np.arange(50) * 3 + 4)
        t = AIT(d)
        q = QueryInterval(0, 1000)
        pmf = {i: 1 / 50 for i in range(50)}
        passes = sum(chi_square_test(distribution_report(t.sample_ids(q, 10**5, np.random.default_rng(s)), pmf))[0]
                     for s in range(100))
        assert passes >= 99
