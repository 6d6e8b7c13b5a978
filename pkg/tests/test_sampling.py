from fractions import Fraction
import json
from pathlib import Path

import numpy as np
import pytest

from majolat import core, lattice, sampling
from majolat.core import RATIONAL, ComparisonResult as CR
from majolat.errors import DimensionTooSmall, TooLarge, UnknownFunctional
from majolat.sampling import SampleConfig

FIXTURES = Path(__file__).parent / "fixtures"


class TestDraws:
    def test_simplex_is_valid_and_sorted(self):
        X = sampling.simplex_array(seed=1, d=5, count=3000)
        assert X.shape == (3000, 5)
        np.testing.assert_allclose(X.sum(axis=1), 1.0, atol=1e-12)
        assert (np.diff(X, axis=1) <= 0).all()

    def test_uniform_on_simplex(self):
        # sorted Dirichlet(1,1,1): E[max] = (1/3)(1 + 1/2 + 1/3) = 11/18
        X = sampling.simplex_array(seed=5, d=3, count=100_000)
        assert X[:, 0].mean() == pytest.approx(11 / 18, abs=0.005)
        assert X[:, 2].mean() == pytest.approx(1 / 9, abs=0.005)

    def test_reproducible_and_index_addressed(self):
        cfg = SampleConfig(4, seed=9)
        X = sampling.simplex_array(9, 4, 3000)
        for i in (0, 1023, 1024, 2999):
            assert sampling.sample_simplex(cfg, i).values == tuple(X[i])

    def test_seeds_and_streams_differ(self):
        a = sampling.simplex_array(1, 4, 10)
        assert not np.allclose(a, sampling.simplex_array(2, 4, 10))
        P, _ = sampling.pair_arrays(1, 4, 10)
        assert not np.allclose(a, P)

    def test_rational_draw_is_exact(self):
        p = sampling.sample_simplex(SampleConfig(4, seed=2, backend=RATIONAL), 17)
        assert all(isinstance(v, Fraction) for v in p.values)
        assert sum(p.values) == 1
        assert list(p.values) == sorted(p.values, reverse=True)

    def test_incomparable_pair(self):
        cfg = SampleConfig(4, seed=3)
        for i in range(20):
            p, q = sampling.sample_incomparable_pair(cfg, i)
            assert core.compare(p, q) is CR.INCOMPARABLE
        with pytest.raises(DimensionTooSmall):
            sampling.sample_incomparable_pair(SampleConfig(2))

    def test_incomparable_arrays(self):
        P, Q = sampling.incomparable_arrays(4, 5, 500)
        assert P.shape == (500, 5)
        assert all(core.compare(core.Distribution(tuple(p)), core.Distribution(tuple(q))) is CR.INCOMPARABLE
                   for p, q in zip(P, Q))


class TestBounds:
    @pytest.mark.parametrize("backend", [core.FLOAT, RATIONAL])
    def test_minorizer_and_majorizer(self, backend):
        cfg = SampleConfig(5, seed=4, backend=backend)
        for i in range(200):
            p, q = sampling.random_pair(cfg, i)
            r = sampling.sample_minorizer(p, q, cfg, i)
            s = sampling.sample_majorizer(p, q, cfg, i)
            for x in (p, q):
                assert core.majorized_by(r, x)
                assert core.majorized_by(x, s)
            # and the lattice bounds sit between them
            assert core.majorized_by(r, lattice.meet(p, q))
            assert core.majorized_by(lattice.join(p, q), s)

    def test_comparable_pair(self):
        cfg = SampleConfig(6, seed=8, backend=RATIONAL)
        for i in range(100):
            p, q = sampling.comparable_pair(cfg, i)
            assert core.majorized_by(p, q)


class TestGrid:
    @pytest.mark.parametrize("d, n", [(1, 5), (2, 6), (3, 9), (4, 10), (5, 12)])
    def test_grid_size_is_partition_count(self, d, n):
        grid = sampling.enumerate_grid(SampleConfig(d, grid_denominator=n))
        assert len(grid) == sampling.count_partitions(n, d)
        assert len({g.values for g in grid}) == len(grid)
        assert all(sum(g.values) == 1 and g.dim == d for g in grid)

    def test_partition_counts(self):
        # p(n, ≤3 parts) = round((n+3)^2 / 12)
        assert [sampling.count_partitions(n, 3) for n in range(10)] == [round((n + 3) ** 2 / 12) for n in range(10)]

    def test_too_large(self):
        with pytest.raises(TooLarge):
            sampling.enumerate_grid(SampleConfig(8, grid_denominator=200))

    def test_grid_union_deduplicates(self):
        pts = sampling.grid_union(2, 4)
        # 1/1; 1/2; 1/3 grid: (1,0),(2/3,1/3); 1/4: (3/4,1/4) -> (1,0),(1/2,1/2),(2/3,1/3),(3/4,1/4)
        assert len(pts) == 4


class TestSearch:
    def test_finds_both_signs_for_renyi_half(self):
        cfg = SampleConfig(4, seed=1, max_tries=50_000)
        neg = sampling.search_counterexample("renyi", "supermodular", 0.5, cfg, "negative")
        pos = sampling.search_counterexample("renyi", "supermodular", 0.5, cfg, "positive")
        assert neg.found and neg.witness_gap < -1e-6
        assert pos.found and pos.witness_gap > 1e-6

    def test_shannon_has_no_negative_witness(self):
        cfg = SampleConfig(4, seed=1, max_tries=20_000)
        res = sampling.search_counterexample("shannon", "supermodular", None, cfg, "negative")
        assert not res.found
        assert res.tries == 20_000

    def test_independent_of_threads(self):
        cfg = SampleConfig(3, seed=1, max_tries=100_000)
        a = sampling.search_counterexample("renyi", "supermodular", 0.7, cfg, "negative", threads=1)
        b = sampling.search_counterexample("renyi", "supermodular", 0.7, cfg, "negative", threads=3)
        assert (a.witness_index, a.witness_gap) == (b.witness_index, b.witness_gap)

    def test_bad_functional(self):
        with pytest.raises(UnknownFunctional):
            sampling.search_counterexample("nope", "supermodular", 0.5, SampleConfig(3))

    def test_pin_and_reverify(self):
        cfg = SampleConfig(5, seed=2, max_tries=50_000)
        res = sampling.search_counterexample("renyi", "supermodular", 0.3, cfg, "negative")
        rec = sampling.pin_witness(res)
        assert json.loads(json.dumps(rec)) == rec
        assert rec["gap"] == pytest.approx(res.witness_gap, abs=1e-9)
        assert sampling.witness_gap(rec) == rec["gap"]

    def test_pinned_fixture_file_reverifies(self):
        records = [json.loads(l) for l in (FIXTURES / "renyi_witnesses.jsonl").read_text().splitlines()]
        assert records
        for rec in records:
            gap = sampling.witness_gap(rec)
            assert gap == pytest.approx(rec["gap"], abs=1e-12)
            assert (gap < -1e-6) if rec["direction"] == "negative" else (gap > 1e-6)
