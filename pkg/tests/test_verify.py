import io
import math

import pytest
from hypothesis import given, settings

from majolat import core, verify
from majolat.core import ComparisonResult as CR
from majolat.errors import AlphaOutOfRange, UnknownInequality
from majolat.verify import InequalityId as I

from conftest import float_dists

P, Q = core.make_distribution([0.5, 0.5, 0]), core.make_distribution([0.6, 0.2, 0.2])


class TestIds:
    @pytest.mark.parametrize("text, iid", [("Cor3", I.COR3_ETA), ("cor3_eta", I.COR3_ETA),
                                           ("Thm1", I.THM1), ("LogSubmod", I.LOG_SUBMOD),
                                           ("DistanceTriangle", I.DISTANCE_TRIANGLE)])
    def test_parse(self, text, iid):
        assert I.parse(text) is iid

    def test_unknown(self):
        with pytest.raises(UnknownInequality):
            I.parse("Cor5")

    def test_universality(self):
        assert verify.is_universal(I.COR9_RENYI_ETA, 2.0)
        assert not verify.is_universal(I.COR9_RENYI_ETA, 0.5)
        assert verify.is_universal(I.COR6_TAU, 0.5)


class TestRunningExample:
    def test_precursors(self):
        for iid in verify.PRECURSORS:
            rep = verify.check(iid, P, Q)
            assert rep.passed and rep.gap >= 0
            assert rep.comparability is CR.INCOMPARABLE

    def test_cor3(self):
        rep = verify.check("Cor3", P, Q)
        assert rep.correction == pytest.approx(0.043972, abs=1e-5)
        assert rep.lhs - rep.rhs + rep.correction == pytest.approx(0.085477, abs=1e-5)
        assert rep.passed

    def test_cor4(self):
        rep = verify.check("Cor4", P, Q)
        assert rep.lhs - rep.rhs + rep.correction == pytest.approx(0.885474, abs=1e-5)
        assert rep.correction == pytest.approx(0.568483, abs=1e-5)
        assert rep.detail["kl_tensor"] == rep.correction

    def test_tsallis(self):
        r6, r7 = verify.check("Cor6", P, Q, 2.0), verify.check("Cor7", P, Q, 2.0)
        assert r6.correction == pytest.approx(0.02, abs=1e-12)
        assert r6.gap + r6.correction == pytest.approx(0.04, abs=1e-12)
        assert r7.correction == pytest.approx(0.24, abs=1e-12)
        assert r7.gap + r7.correction == pytest.approx(0.44, abs=1e-12)

    def test_renyi(self):
        r8 = verify.check("Cor8", P, Q, 2.0)
        assert (r8.lhs, r8.rhs) == (pytest.approx(2.339345, abs=1e-5), pytest.approx(2.184425, abs=1e-5))
        r9 = verify.check("Cor9", P, Q, 2.0)
        assert r9.correction == pytest.approx(0.115416, abs=1e-5)
        # slack H2(p) + H2(q) - H2(m) before the correction is subtracted
        assert r9.gap + r9.correction == pytest.approx(0.788496, abs=1e-5)
        assert r9.passed

    def test_log_submod(self):
        rep = verify.check("LogSubmod", P, Q, 2.0)
        assert rep.lhs == pytest.approx(0.5 * 0.44)
        assert rep.rhs == pytest.approx(0.38 * 0.52)

    def test_renyi_supermod_alpha_range(self):
        with pytest.raises(AlphaOutOfRange):
            verify.check("Cor8", P, Q, 0.5)

    def test_sum_concave(self):
        for functional, alpha in [("shannon", None), ("tsallis", 0.5), ("alpha_norm_pow", 0.5), ("alpha_norm_pow", 3.0)]:
            assert verify.check("Cor1", P, Q, alpha, functional=functional).passed
            assert verify.check("Cor2", P, Q, alpha, functional=functional).passed

    def test_distance_triangle(self):
        rep = verify.check("DistanceTriangle", P, Q, 1.0, r=core.uniform(3))
        assert rep.passed
        with pytest.raises(ValueError):
            verify.check("DistanceTriangle", P, Q, 1.0)


class TestRefinementFallback:
    def test_infinite_correction_is_not_refined(self):
        # p has full support, the direct sum of meet and join does not cover it
        p = core.make_distribution([0.5, 0.3, 0.2])
        q = core.make_distribution([0.7, 0.3, 0.0])
        rep = verify.check("Cor4", p, q)
        assert rep.passed


@settings(max_examples=60, deadline=None)
@given(float_dists(min_dim=2, max_dim=6), float_dists(min_dim=2, max_dim=6))
def test_universal_inequalities_hold(p, q):
    for iid, alpha in [("Cor3", None), ("Cor4", None), ("Cor6", 0.5), ("Cor6", 2.0), ("Cor7", 3.0),
                       ("Cor8", 1.5), ("Cor9", 2.0), ("LogSubmod", 3.0), ("Thm1", None), ("Thm2", None),
                       ("Lem2", None)]:
        rep = verify.check(iid, p, q, alpha)
        assert rep.passed, (iid, alpha, rep)
        if rep.refined and not math.isinf(rep.correction):
            assert rep.correction >= 0


class TestBatch:
    def test_batch_summary(self):
        res = verify.batch_verify("Cor6", 4, 300, seed=1, alpha_grid=[0.5, 2.0])
        s = res.summary
        assert s["total"] == 600 and s["passed"] == 600 and s["all_universal_passed"]
        assert [g["alpha"] for g in s["per_alpha"]] == [0.5, 2.0]
        assert s["argmin"]["alpha"] in (0.5, 2.0)

    def test_threads_do_not_matter(self):
        a = verify.batch_verify("Cor3", 5, 2500, seed=7, threads=1)
        b = verify.batch_verify("Cor3", 5, 2500, seed=7, threads=3)
        assert verify.csv_text(a.reports) == verify.csv_text(b.reports)

    def test_rational_only_for_precursors(self):
        res = verify.batch_verify("Thm1", 3, 50, seed=2, backend=core.RATIONAL)
        assert res.summary["passed"] == 50
        with pytest.raises(ValueError):
            verify.batch_verify("Cor3", 3, 50, seed=2, backend=core.RATIONAL)

    def test_non_universal_failures_do_not_fail_the_run(self):
        res = verify.batch_verify("Cor9", 4, 300, seed=1, alpha_grid=[0.3])
        assert res.summary["passed"] < 300
        assert res.summary["all_universal_passed"]

    def test_argmin_pair_attached(self):
        res = verify.batch_verify("Cor3", 4, 100, seed=3)
        s = verify.attach_argmin_pair(res.summary, 3)
        p, q = (core.make_distribution(x) for x in s["argmin"]["pair"])
        assert verify.check("Cor3", p, q).gap == pytest.approx(s["min_gap"], abs=1e-15)

    def test_precursor_sweep(self):
        out = verify.precursor_sweep("Lem2", 4, 5000, seed=1)
        assert out["failures"] == 0 and out["count"] == 5000


class TestCsv:
    def test_roundtrip(self):
        res = verify.batch_verify("Cor7", 3, 40, seed=5, alpha_grid=[2.0])
        text = verify.csv_text(res.reports)
        assert text.splitlines()[0] == ",".join(verify.CSV_COLUMNS)
        rows = verify.read_csv(io.StringIO(text))
        assert len(rows) == 40 and all(r["passed"] for r in rows)
        summary = verify.summarize_rows(rows)
        assert summary["groups"][0]["count"] == 40

    def test_rejects_foreign_csv(self):
        with pytest.raises(ValueError):
            verify.read_csv(io.StringIO("a,b\n1,2\n"))

    def test_formatting(self):
        assert verify._fmt(None) == ""
        assert verify._fmt(math.inf) == "inf"
        assert verify._fmt(1 / 3) == "0.333333333"
