import math

import numpy as np
import pytest

from conftest import random_dataset, random_query
from intervalirs.aitv import AITV, AITVStats, bucket_size
from intervalirs.errors import DegenerateSelectivity, InvalidSampleSize
from intervalirs.model import Dataset, QueryInterval, pair_sort_order
from intervalirs.oracle import chi_square_test, distribution_report, exact_aitv_acceptance, oracle_range


class TestBuckets:
    def test_exact_fit(self):
        B = bucket_size(3)
        assert B == 3
        d = Dataset([1, 2, 4], [3, 5, 4])
        v = AITV(d)
        assert v.bucket_count == 1 and not v.pseudo.any()
        x = v.virtual_interval(0)
        assert (x.l, x.r) == (1, 5)

    def test_two_member_virtual(self):
        d = Dataset([1, 2], [3, 5])
        v = AITV(d)
        assert v.B == 2
        x = v.virtual_interval(0)
        assert (x.l, x.r) == (1, 5)

    def test_padding_and_partition(self, rng):
        for n in (1, 7, 100, 1001):
            d = random_dataset(rng, n)
            v = AITV(d)
            B = v.B
            assert B == max(1, math.ceil(math.log2(n + 2)))
            assert v.bucket_count == -(-n // B)
            assert v.members.size <= n + B
            real = v.members[~v.pseudo]
            np.testing.assert_array_equal(real, pair_sort_order(d.l, d.r))
            k = v.bucket_count - 1
            pads = v.members[k][v.pseudo[k]]
            last_real = v.members[k][~v.pseudo[k]][-1]
            assert np.all(pads == last_real)
            for j in range(v.bucket_count):
                m = v.members[j][~v.pseudo[j]]
                x = v.virtual_interval(j)
                assert x.l == d.l[m].min() and x.r == d.r[m].max()
            assert [b.pseudo for b in v.bucket(k)] == v.pseudo[k].tolist()

    def test_large_slot_bound(self):
        rng = np.random.default_rng(3)
        d = random_dataset(rng, 10**5, domain=10**7)
        v = AITV(d)
        assert v.members.size <= d.n + v.B
        assert v.bucket_count == -(-d.n // v.B)
        assert v.entry_count() <= 4 * d.n

    def test_covering(self, rng):
        for _ in range(30):
            d = random_dataset(rng, int(rng.integers(1, 300)))
            v = AITV(d)
            for _ in range(20):
                q = random_query(rng)
                covered = set()
                for rec in v.vtree.query_records(q):
                    for k in rec.items().tolist():
                        covered.update(v.members[k][~v.pseudo[k]].tolist())
                assert set(oracle_range(d, q).tolist()) <= covered
                assert v.range_count(q) == oracle_range(d, q).size


class TestSampling:
    def test_single_bucket_no_rejections(self):
        rng = np.random.default_rng(4)
        d = Dataset([0, 1, 2], [10, 10, 10])
        v = AITV(d)
        assert v.bucket_count == 1 and not v.pseudo.any()
        st = AITVStats()
        ids = v.sample_ids(QueryInterval(5, 5), 3000, rng, st)
        assert st.rejections == 0
        ok, p = chi_square_test(distribution_report(ids, {0: 1 / 3, 1: 1 / 3, 2: 1 / 3}))
        assert ok, p

    def test_empty_and_errors(self, rng):
        v = AITV(Dataset([0, 100], [1, 101]))
        assert v.aitv_sample(QueryInterval(200, 300), 5, rng) == []
        assert v.aitv_sample(QueryInterval(0, 200), 0, rng) == []
        with pytest.raises(InvalidSampleSize):
            v.sample_ids(QueryInterval(0, 1), -1, rng)

    def test_degenerate(self, rng):
        # one bucket [0,1] + [100,101]; the virtual interval covers the gap
        v = AITV(Dataset([0, 100], [1, 101]))
        assert v.B == 2 and v.bucket_count == 1
        with pytest.raises(DegenerateSelectivity):
            v.sample_ids(QueryInterval(50, 60), 5, rng)

    def test_exact_conditional_uniformity(self, rng):
        checked = 0
        while checked < 40:
            d = random_dataset(rng, int(rng.integers(1, 300)))
            v = AITV(d)
            q = random_query(rng)
            truth = oracle_range(d, q)
            mass = exact_aitv_acceptance(v, q)
            assert sorted(mass) == truth.tolist()
            if truth.size:
                assert len(set(mass.values())) == 1
                checked += 1

    def test_chi_square(self):
        rng = np.random.default_rng(14)
        d = random_dataset(rng, 2000)
        v = AITV(d)
        q = QueryInterval(400, 430)
        truth = oracle_range(d, q)
        assert 20 <= truth.size <= 400
        ids = v.sample_ids(q, 10**5, rng)
        ok, p = chi_square_test(distribution_report(ids, {int(i): 1 / truth.size for i in truth}))
        assert ok, p

    def test_attempt_accounting(self, rng):
        d = random_dataset(rng, 3000)
        v = AITV(d)
        st = AITVStats()
        ids = v.sample_ids(QueryInterval(200, 700), 500, rng, st)
        assert ids.size == st.accepted == 500
        assert st.attempts >= 500 and st.rejections == st.attempts - 500
