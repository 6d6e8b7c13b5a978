"""Row-wise numpy versions of the lattice operations, for large random sweeps.

Every array here is ``(N, d)``: one sorted distribution per row.  These
mirror the scalar functions in :mod:`majolat.core`, :mod:`majolat.lattice`
and :mod:`majolat.functionals` and are cross-checked against them in the
test-suite; the scalar versions remain the reference.
"""

from __future__ import annotations

import numpy as np

from .core import DEFAULT_TOLERANCE, ComparisonResult

EQUAL, FIRST, SECOND, INCOMPARABLE = 0, 1, 2, 3

CODE_TO_RESULT = {
    EQUAL: ComparisonResult.EQUAL,
    FIRST: ComparisonResult.FIRST_MAJORIZED,
    SECOND: ComparisonResult.SECOND_MAJORIZED,
    INCOMPARABLE: ComparisonResult.INCOMPARABLE,
}


def sort_desc(X: np.ndarray) -> np.ndarray:
    return -np.sort(-X, axis=1)


def pad_cols(X: np.ndarray, d: int) -> np.ndarray:
    if X.shape[1] >= d:
        return X
    return np.pad(X, ((0, 0), (0, d - X.shape[1])))


def prefix(X: np.ndarray) -> np.ndarray:
    """Lorenz ordinates S_0..S_d per row."""
    out = np.zeros((X.shape[0], X.shape[1] + 1))
    np.cumsum(X, axis=1, out=out[:, 1:])
    return out


def compare_codes(X: np.ndarray, Y: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> np.ndarray:
    """Row-wise :func:`majolat.core.compare`; returns the integer codes above."""
    d = max(X.shape[1], Y.shape[1])
    diff = prefix(pad_cols(X, d))[:, 1:] - prefix(pad_cols(Y, d))[:, 1:]
    same_total = np.abs(diff[:, -1]) <= tol
    x_below = np.all(diff <= tol, axis=1) & same_total
    y_below = np.all(diff >= -tol, axis=1) & same_total
    codes = np.full(X.shape[0], INCOMPARABLE, dtype=np.int8)
    codes[x_below & ~y_below] = FIRST
    codes[y_below & ~x_below] = SECOND
    codes[x_below & y_below] = EQUAL
    return codes


def min_slack(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Row-wise min_k S_k(Y) - S_k(X)."""
    d = max(X.shape[1], Y.shape[1])
    return (prefix(pad_cols(Y, d))[:, 1:] - prefix(pad_cols(X, d))[:, 1:]).min(axis=1)


def meet(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return sort_desc(np.diff(np.minimum(prefix(P), prefix(Q)), axis=1))


def beta(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return np.diff(np.maximum(prefix(P), prefix(Q)), axis=1)


def concave_majorant(Y: np.ndarray) -> np.ndarray:
    """Least concave majorant of the points (k, Y[:, k]), evaluated at k = 0..n-1.

    Each interior ordinate is lifted to the highest chord passing over it.
    Cost is O(n³) numpy operations on columns, which for the dimensions
    swept here (n ≤ 13) is far cheaper than a Python-level hull per row.
    """
    H = Y.copy()
    n = Y.shape[1]
    for i in range(n - 2):
        yi = Y[:, i : i + 1]
        for j in range(i + 2, n):
            ks = np.arange(1, j - i) / (j - i)
            chord = yi + (Y[:, j : j + 1] - yi) * ks
            np.maximum(H[:, i + 1 : j], chord, out=H[:, i + 1 : j])
    return H


def join(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    top = np.maximum(prefix(P), prefix(Q))
    return sort_desc(np.diff(concave_majorant(top), axis=1))


def direct_sum(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    d = max(P.shape[1], Q.shape[1])
    return sort_desc(np.concatenate([pad_cols(P, d), pad_cols(Q, d)], axis=1))


def tensor(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    n = P.shape[0]
    return sort_desc((P[:, :, None] * Q[:, None, :]).reshape(n, -1))


def point_masses(n: int, d: int) -> np.ndarray:
    E = np.zeros((n, d))
    E[:, 0] = 1.0
    return E


# -- functionals --------------------------------------------------------------


def _xlogx(X: np.ndarray, log) -> np.ndarray:
    safe = np.where(X > 0, X, 1.0)
    return np.where(X > 0, X * log(safe), 0.0)


def shannon(X: np.ndarray) -> np.ndarray:
    return -_xlogx(X, np.log2).sum(axis=1)


def alpha_norm_pow(X: np.ndarray, alpha: float) -> np.ndarray:
    safe = np.where(X > 0, X, 1.0)
    return np.where(X > 0, safe**alpha, 0.0).sum(axis=1)


def renyi(X: np.ndarray, alpha: float) -> np.ndarray:
    if abs(alpha - 1.0) <= 1e-12:
        return shannon(X)
    return np.log2(alpha_norm_pow(X, alpha)) / (1.0 - alpha)


def tsallis(X: np.ndarray, alpha: float) -> np.ndarray:
    if abs(alpha - 1.0) <= 1e-12:
        return -_xlogx(X, np.log).sum(axis=1)
    return (alpha_norm_pow(X, alpha) - 1.0) / (1.0 - alpha)


FUNCTIONALS = {
    "shannon": lambda X, alpha=None: shannon(X),
    "renyi": renyi,
    "tsallis": tsallis,
    "alpha_norm_pow": alpha_norm_pow,
}


def supermodular_gap(P, Q, functional: str, alpha=None) -> np.ndarray:
    """F(m) + F(j) - F(p) - F(q) per row."""
    f = FUNCTIONALS[functional]
    M, J = meet(P, Q), join(P, Q)
    return f(M, alpha) + f(J, alpha) - f(P, alpha) - f(Q, alpha)


def subadditive_gap(P, Q, functional: str, alpha=None) -> np.ndarray:
    """F(p) + F(q) - F(m) per row."""
    f = FUNCTIONALS[functional]
    return f(P, alpha) + f(Q, alpha) - f(meet(P, Q), alpha)
