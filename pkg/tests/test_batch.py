import numpy as np
import pytest

from majolat import batch, core, functionals as fn, lattice
from majolat.sampling import pair_arrays
from majolat.verify import InequalityId, precursor_codes


def as_dists(X):
    return [core.Distribution(tuple(float(v) for v in row)) for row in X]


@pytest.fixture(scope="module", params=[2, 3, 5, 8])
def pairs(request):
    P, Q = pair_arrays(seed=3, d=request.param, count=400)
    return P, Q, as_dists(P), as_dists(Q)


def test_compare_codes(pairs):
    P, Q, ps, qs = pairs
    codes = batch.compare_codes(P, Q)
    assert [batch.CODE_TO_RESULT[c] for c in codes] == [core.compare(p, q) for p, q in zip(ps, qs)]


def test_compare_codes_handles_ties_and_totals():
    X = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.6, 0.4, 0.0]])
    Y = np.array([[0.5, 0.5, 0.0], [1.0, 0.0, 0.0], [0.6, 0.2, 0.0]])
    assert list(batch.compare_codes(X, Y)) == [batch.EQUAL, batch.FIRST, batch.INCOMPARABLE]


@pytest.mark.parametrize("name", ["meet", "join"])
def test_lattice_ops(pairs, name):
    P, Q, ps, qs = pairs
    got = getattr(batch, name)(P, Q)
    want = np.array([getattr(lattice, name)(p, q).values for p, q in zip(ps, qs)])
    np.testing.assert_allclose(got, want, atol=1e-14)


def test_beta(pairs):
    P, Q, ps, qs = pairs
    want = np.array([lattice.beta(p, q).values for p, q in zip(ps, qs)])
    np.testing.assert_allclose(batch.beta(P, Q), want, atol=1e-14)


def test_concave_majorant_matches_hull():
    rng = np.random.default_rng(0)
    Y = np.cumsum(rng.random((200, 7)), axis=1)
    Y = np.concatenate([np.zeros((200, 1)), Y], axis=1)
    want = np.array([lattice.least_concave_majorant(list(row)) for row in Y])
    np.testing.assert_allclose(batch.concave_majorant(Y), want, atol=1e-12)


def test_direct_sum_and_tensor(pairs):
    P, Q, ps, qs = pairs
    np.testing.assert_allclose(
        batch.direct_sum(P, Q), np.array([core.direct_sum(p, q).values for p, q in zip(ps, qs)])
    )
    np.testing.assert_allclose(
        batch.tensor(P, Q), np.array([core.tensor(p, q).values for p, q in zip(ps, qs)])
    )


@pytest.mark.parametrize("name, alpha", [("shannon", None), ("renyi", 0.5), ("renyi", 2.0),
                                         ("tsallis", 0.0), ("tsallis", 3.0), ("alpha_norm_pow", 1.5)])
def test_functionals(pairs, name, alpha):
    P, _, ps, _ = pairs
    want = [fn.FUNCTIONALS[name](p, alpha) for p in ps]
    np.testing.assert_allclose(batch.FUNCTIONALS[name](P, alpha), want, atol=1e-12)


def test_supermodular_gap(pairs):
    P, Q, ps, qs = pairs
    f = fn.FUNCTIONALS["renyi"]
    want = [
        f(lattice.meet(p, q), 0.5) + f(lattice.join(p, q), 0.5) - f(p, 0.5) - f(q, 0.5)
        for p, q in zip(ps, qs)
    ]
    np.testing.assert_allclose(batch.supermodular_gap(P, Q, "renyi", 0.5), want, atol=1e-12)


@pytest.mark.parametrize("iid", [InequalityId.THM1, InequalityId.THM2, InequalityId.LEM2])
def test_precursor_codes_match_scalar(pairs, iid):
    P, Q, ps, qs = pairs
    scalar = {
        InequalityId.THM1: lattice.precursor_supermodular,
        InequalityId.THM2: lattice.precursor_subadditive,
        InequalityId.LEM2: lattice.precursor_tensor,
    }[iid]
    codes = precursor_codes(iid, P, Q)
    assert [batch.CODE_TO_RESULT[c] for c in codes] == [scalar(p, q) for p, q in zip(ps, qs)]
