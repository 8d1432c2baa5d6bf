from fractions import Fraction

import numpy as np
import pytest

from conftest import covered_ids, random_dataset, random_query
from intervalirs.ait import AIT, ListTag, QueryStats, pool_capacity
from intervalirs.errors import DuplicateId, InvalidSampleSize, NotFound
from intervalirs.model import Dataset, Interval, QueryInterval, pair_sort_order
from intervalirs.oracle import chi_square_test, distribution_report, exact_uniform_pmf, oracle_range


def fresh_equivalent(tree: AIT, l, r, alive, queries):
    """Coverage and counts of ``tree`` equal a from-scratch build over ``alive``."""
    alive = np.asarray(alive, dtype=np.int64)
    ref = AIT(Dataset(np.asarray(l)[alive], np.asarray(r)[alive]))
    for q in queries:
        got = np.sort(covered_ids(tree.query_records(q)))
        want = np.sort(alive[covered_ids(ref.query_records(q))])
        np.testing.assert_array_equal(got, want)
        assert tree.range_count(q) == ref.range_count(q) == want.size


class TestBuild:
    def test_single(self):
        t = AIT(Dataset([1], [10]))
        u = t.root
        assert [u.ll.tolist(), u.lr.tolist(), u.al.tolist(), u.ar.tolist()] == [[0]] * 4

    def test_root_is_pair_sorted(self, rng):
        d = random_dataset(rng, 500)
        t = AIT(d)
        np.testing.assert_array_equal(t.root.al, pair_sort_order(d.l, d.r))
        assert np.all(np.diff(d.r[t.root.ar]) >= 0)

    def test_augmented_lists_are_subtrees(self, rng):
        for _ in range(20):
            d = random_dataset(rng, int(rng.integers(1, 400)))
            t = AIT(d)
            for u, _ in t.nodes():
                parts = [u.ll] + [c.al for c in (u.left, u.right) if c is not None]
                assert sorted(np.concatenate(parts).tolist()) == sorted(u.al.tolist())
                assert sorted(u.al.tolist()) == sorted(u.ar.tolist())
                assert np.all(np.diff(d.l[u.al]) >= 0) and np.all(np.diff(d.r[u.ar]) >= 0)

    def test_eleven_intervals(self):
        # small hand-made tree: child AL lists hold exactly their routed intervals
        l = [1, 2, 3, 5, 8, 9, 12, 14, 15, 18, 20]
        r = [4, 6, 11, 7, 10, 16, 13, 19, 17, 22, 21]
        d = Dataset(l, r)
        t = AIT(d)
        c = t.root.center
        left = [i for i in range(11) if r[i] < c]
        right = [i for i in range(11) if l[i] > c]
        assert sorted(t.root.left.al.tolist()) == left
        assert sorted(t.root.right.al.tolist()) == right

    def test_space_identity(self, rng):
        d = random_dataset(rng, 1500)
        t = AIT(d)
        depth_sum = sum(len(u.ll) * (dep + 1) for u, dep in t.nodes())
        assert t.augmented_entries() == depth_sum <= d.n * (t.height + 1)


class TestQueryRecords:
    def test_example_prefix_record(self):
        d = Dataset([1, 2, 3, 4, 5, 6], [20] * 6)
        t = AIT(d)
        assert t.root.center == 6 and t.root.left is None
        recs = t.query_records(QueryInterval(0, 4))
        assert [(r.tag, r.idx_l, r.idx_r) for r in recs] == [(ListTag.LL, 1, 4)]

    def test_whole_domain_and_disjoint(self, rng):
        d = random_dataset(rng, 700)
        t = AIT(d)
        st = QueryStats()
        recs = t.query_records(QueryInterval(-1, 10**6), st)
        assert recs.total == 700 and st.case3 == 1 and st.visited <= 3
        assert len(t.query_records(QueryInterval(5000, 6000))) == 0
        assert AIT(Dataset([], [])).range_count(QueryInterval(0, 1)) == 0

    def test_records_against_oracle(self, rng):
        for _ in range(60):
            d = random_dataset(rng, int(rng.integers(1, 800)), mode=str(rng.choice(["mixed", "points", "long"])))
            t = AIT(d)
            for _ in range(50):
                q = random_query(rng)
                st = QueryStats()
                recs = t.query_records(q, st)
                ids = covered_ids(recs)
                assert np.unique(ids).size == ids.size
                np.testing.assert_array_equal(np.sort(ids), oracle_range(d, q))
                assert recs.total == ids.size == t.range_count(q)
                assert st.case3 <= 1
                assert st.visited <= t.height + 3
                assert st.binary_searches <= st.visited + 2
                for rec in recs:
                    assert 1 <= rec.idx_l <= rec.idx_r

    def test_float_coordinates(self, rng):
        d = random_dataset(rng, 500, integer=False)
        t = AIT(d)
        for _ in range(100):
            a, b = np.sort(rng.uniform(-10, 1010, 2))
            q = QueryInterval(float(a), float(b))
            np.testing.assert_array_equal(np.sort(covered_ids(t.query_records(q))), oracle_range(d, q))


class TestSampling:
    def test_trivial(self, rng):
        d = Dataset([0, 10], [5, 20])
        t = AIT(d)
        assert t.irs_sample(QueryInterval(0, 30), 0, rng) == []
        assert [x.id for x in t.irs_sample(QueryInterval(15, 16), 5, rng)] == [1] * 5
        assert t.irs_sample(QueryInterval(6, 9), 3, rng) == []
        with pytest.raises(InvalidSampleSize):
            t.irs_sample(QueryInterval(0, 1), -1, rng)

    def test_forty_intervals_binomial(self):
        rng = np.random.default_rng(5)
        d = Dataset(np.arange(0, 400, 10), np.arange(0, 400, 10) + 15)
        t = AIT(d)
        q = QueryInterval(0, 1000)
        assert t.range_count(q) == 40
        freq = np.bincount(t.sample_ids(q, 10**6, rng), minlength=40) / 10**6
        sigma = np.sqrt(0.025 * 0.975 / 10**6)
        assert np.all(np.abs(freq - 0.025) <= 3 * sigma)

    def test_samples_overlap(self, rng):
        d = random_dataset(rng, 1000)
        t = AIT(d)
        for _ in range(50):
            q = random_query(rng)
            ids = t.sample_ids(q, 200, rng)
            if t.range_count(q):
                assert np.isin(ids, oracle_range(d, q)).all() and ids.size == 200
            else:
                assert ids.size == 0

    def test_exact_uniformity(self, rng):
        checked = 0
        while checked < 30:
            d = random_dataset(rng, int(rng.integers(5, 200)))
            t = AIT(d)
            q = random_query(rng)
            recs = t.query_records(q)
            if not recs:
                continue
            pmf = exact_uniform_pmf(recs)
            truth = oracle_range(d, q)
            assert sorted(pmf) == truth.tolist()
            assert set(pmf.values()) == {Fraction(1, truth.size)}
            checked += 1

    def test_reproducible(self, rng):
        d = random_dataset(rng, 300)
        t = AIT(d)
        q = QueryInterval(100, 600)
        a = t.sample_ids(q, 50, np.random.default_rng(9))
        b = t.sample_ids(q, 50, np.random.default_rng(9))
        np.testing.assert_array_equal(a, b)


class TestUpdates:
    def test_insert_into_empty(self):
        t = AIT(Dataset([], []))
        t.insert(Interval(3, 7, 0))
        u = t.root
        assert [u.ll.tolist(), u.lr.tolist(), u.al.tolist(), u.ar.tolist()] == [[0]] * 4
        assert t.range_count(QueryInterval(5, 5)) == 1

    def test_insert_at_root_center(self, rng):
        d = random_dataset(rng, 200)
        t = AIT(d)
        c = t.root.center
        before = [(len(k.al) if k else 0) for k in (t.root.left, t.root.right)]
        n_ll = len(t.root.ll)
        t.insert(Interval(c - 1, c + 1, 200))
        assert len(t.root.ll) == len(t.root.lr) == n_ll + 1
        assert [(len(k.al) if k else 0) for k in (t.root.left, t.root.right)] == before

    def test_random_inserts(self, rng):
        for _ in range(10):
            n = int(rng.integers(0, 300))
            k = min(n, 200)
            d = random_dataset(rng, n)
            t = AIT(Dataset(d.l[: n - k], d.r[: n - k]))
            for i in range(n - k, n):
                t.insert(d.interval(i))
            fresh_equivalent(t, d.l, d.r, np.arange(n), [random_query(rng) for _ in range(40)])

    def test_rebuild_on_deep_chain(self):
        t = AIT(Dataset([0], [1]))
        for i in range(1, 300):
            t.insert(Interval(10 * i, 10 * i + 1, i))
        assert t.rebuilds > 0
        assert t.height <= 2 * np.ceil(np.log2(301))
        l = [10 * i for i in range(300)]
        r = [10 * i + 1 for i in range(300)]
        l[0], r[0] = 0, 1
        fresh_equivalent(t, l, r, np.arange(300), [QueryInterval(a, a + 500) for a in range(0, 3000, 97)])

    def test_duplicate_and_missing(self, rng):
        t = AIT(random_dataset(rng, 10))
        with pytest.raises(DuplicateId):
            t.insert(Interval(1, 2, 3))
        with pytest.raises(DuplicateId):
            t.pool_insert(Interval(1, 2, 3))
        with pytest.raises(NotFound):
            t.delete(99)
        t.delete(4)
        with pytest.raises(NotFound):
            t.delete(4)

    def test_pool_of_one_matches_insert(self, rng):
        d = random_dataset(rng, 300)
        a = AIT(d.subset(np.arange(299)))
        b = AIT(d.subset(np.arange(299)))
        a.insert(d.interval(299))
        b.batch_insert([d.interval(299)])
        for q in [random_query(rng) for _ in range(50)]:
            assert np.array_equal(np.sort(covered_ids(a.query_records(q))), np.sort(covered_ids(b.query_records(q))))

    def test_pooled_batches(self, rng):
        n = 3000
        d = random_dataset(rng, n)
        base = n - 1000
        t = AIT(d.subset(np.arange(base)))
        cap = t.pool_capacity
        assert cap == pool_capacity(base)
        flushes = 0
        for i in range(base, n):
            before = len(t.pool)
            t.pool_insert(d.interval(i))
            assert len(t.pool) < t.pool_capacity
            flushes += len(t.pool) == 0 and before > 0
        assert flushes >= 1000 // pool_capacity(n)
        queries = [random_query(rng) for _ in range(100)]
        fresh_equivalent(t, d.l, d.r, np.arange(n), queries)
        t.flush()
        assert t.pool == []
        fresh_equivalent(t, d.l, d.r, np.arange(n), queries)

    def test_sampling_with_pending_pool(self):
        rng = np.random.default_rng(8)
        d = Dataset(np.arange(0, 300, 10), np.arange(0, 300, 10) + 12)
        t = AIT(d.subset(np.arange(20)))
        for i in range(20, 30):
            t.pool_insert(d.interval(i))
        assert len(t.pool) == 10
        q = QueryInterval(0, 1000)
        recs = t.query_records(q)
        assert recs[-1].tag is ListTag.POOL and recs.total == 30
        report = distribution_report(t.sample_ids(q, 10**5, rng), {i: 1 / 30 for i in range(30)})
        ok, p = chi_square_test(report)
        assert ok, p

    def test_deletes(self, rng):
        n = 600
        d = random_dataset(rng, n)
        t = AIT(d)
        gone = rng.choice(n, size=100, replace=False)
        for i in gone.tolist():
            t.delete(i)
        alive = np.setdiff1d(np.arange(n), gone)
        assert len(t) == n - 100
        fresh_equivalent(t, d.l, d.r, alive, [random_query(rng) for _ in range(100)])

    def test_delete_only_and_reinsert(self, rng):
        t = AIT(Dataset([2], [5]))
        t.delete(0)
        assert t.root is None and t.range_count(QueryInterval(0, 10)) == 0
        d = random_dataset(rng, 200)
        t = AIT(d)
        x = d.interval(17)
        t.delete(17)
        t.insert(x)
        fresh_equivalent(t, d.l, d.r, np.arange(200), [random_query(rng) for _ in range(60)])

    def test_delete_all(self, rng):
        d = random_dataset(rng, 150)
        t = AIT(d)
        for i in rng.permutation(150).tolist():
            t.delete(i)
        assert t.root is None and len(t) == 0
        assert t.range_count(QueryInterval(-10, 2000)) == 0

    def test_mixed_interleaving(self, rng):
        n = 800
        d = random_dataset(rng, n)
        t = AIT(d.subset(np.arange(400)))
        alive = set(range(400))
        nxt = 400
        for step in range(600):
            op = rng.integers(0, 3)
            if op == 0 and nxt < n:
                t.insert(d.interval(nxt))
                alive.add(nxt)
                nxt += 1
            elif op == 1 and nxt < n:
                t.pool_insert(d.interval(nxt))
                alive.add(nxt)
                nxt += 1
            elif alive:
                i = int(rng.choice(sorted(alive)))
                t.delete(i)
                alive.remove(i)
        fresh_equivalent(t, d.l, d.r, sorted(alive), [random_query(rng) for _ in range(100)])
