"""Entropies, α-norm powers and divergences on (sorted) probability vectors.

All of these are float-only: rational inputs are converted on entry.
Shannon, Rényi and KL are in bits; Tsallis and ``w_phi`` are unitless
(nats scale).
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import AlphaOutOfRange

LOG2E = math.log2(math.e)
ALPHA_ONE_WINDOW = 1e-12


def _floats(x) -> list:
    return [float(v) for v in x]


def _is_one(alpha: float) -> bool:
    return abs(alpha - 1.0) <= ALPHA_ONE_WINDOW


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if alpha < 0 or math.isnan(alpha):
        raise AlphaOutOfRange(f"alpha must be non-negative, got {alpha}")
    return alpha


def _paired(x, y):
    xs, ys = _floats(x), _floats(y)
    n = max(len(xs), len(ys))
    return xs + [0.0] * (n - len(xs)), ys + [0.0] * (n - len(ys))


def shannon(p: Sequence) -> float:
    return -sum(v * math.log2(v) for v in _floats(p) if v > 0)


def shannon_nats(p: Sequence) -> float:
    return -sum(v * math.log(v) for v in _floats(p) if v > 0)


def alpha_norm_pow(x: Sequence, alpha: float) -> float:
    """Sum of x_i ** alpha over the support (0 ** 0 counts as 0)."""
    alpha = _check_alpha(alpha)
    return sum(v**alpha for v in _floats(x) if v > 0)


def renyi(p: Sequence, alpha: float) -> float:
    alpha = _check_alpha(alpha)
    if _is_one(alpha):
        return shannon(p)
    return math.log2(alpha_norm_pow(p, alpha)) / (1.0 - alpha)


def tsallis(p: Sequence, alpha: float) -> float:
    alpha = _check_alpha(alpha)
    if _is_one(alpha):
        return shannon_nats(p)
    return (alpha_norm_pow(p, alpha) - 1.0) / (1.0 - alpha)


def kl(p: Sequence, q: Sequence) -> float:
    """Relative entropy D(p‖q) in bits, coordinate by coordinate.

    Returns ``math.inf`` when p puts mass where q has none.  Both arguments
    are expected to carry the same total mass.
    """
    total = 0.0
    for a, b in zip(*_paired(p, q)):
        if a <= 0:
            continue
        if b <= 0:
            return math.inf
        total += a * math.log2(a / b)
    # non-negative for inputs of equal mass; only rounding goes below
    return max(total, 0.0)


def _bregman_term(a: float, b: float, alpha: float) -> float:
    # Bregman divergence of g = -phi_alpha, phi_alpha(t) = (t**alpha - t) / (1 - alpha),
    # with the gradient taken at b.  g is convex on [0, 1] for every alpha >= 0.
    if _is_one(alpha):
        if a <= 0:
            return b
        if b <= 0:
            return math.inf
        return a * math.log(a / b) - a + b
    c = 1.0 - alpha

    def g(t):
        return (t - (t**alpha if t > 0 else 0.0)) / c

    if a == b:
        return 0.0
    if b > 0 and a <= 0:
        # g(0) - g(b) + g'(b) b simplifies to b**alpha
        return b**alpha
    if b > 0:
        if alpha > 1:
            lin = (1.0 - alpha * b ** (alpha - 1.0)) * (a - b) / c
        elif alpha == 0:
            lin = (a - b) / c
        else:
            # alpha * b**(alpha - 1) * (a - b), in logs: b**(alpha - 1) overflows for subnormal b
            try:
                curv = alpha * (math.exp(math.log(a) + (alpha - 1.0) * math.log(b)) - b**alpha)
            except OverflowError:
                return math.inf
            lin = ((a - b) - curv) / c
        return g(a) - g(b) - lin
    if alpha > 1:
        return g(a) - g(b) - (a - b) / c
    # g'(0+) = -inf for alpha < 1
    return math.inf


def w_phi(x: Sequence, y: Sequence, alpha: float) -> float:
    """Divergence W_φα(x‖y) = Σ_i B(x_i, y_i) for the convex function -φ_α.

    The bracket is evaluated as g(x) - g(y) - g'(y)(x - y), gradient at the
    *second* argument.  With the gradient at x instead, the sum
    ``(x - y) φ'(x) + φ(y) - φ(x)`` is the negative of a Bregman divergence
    and tends to -D(x‖y) as α → 1, so it cannot serve as a non-negative
    correction term.  With the gradient at y:

    * α = 1 gives Σ x ln(x/y) - x + y, i.e. KL in nats for equal totals;
    * α = 2 gives Σ (x_i - y_i)²;
    * the result is ≥ 0 and vanishes only at x = y.

    Returns ``math.inf`` if α ≤ 1 and some y_i = 0 < x_i.
    """
    alpha = _check_alpha(alpha)
    total = 0.0
    for a, b in zip(*_paired(x, y)):
        term = _bregman_term(a, b, alpha)
        if term == math.inf:
            return math.inf
        total += term
    # every term is >= 0 in exact arithmetic; only rounding goes below
    return max(total, 0.0)


def lattice_distance(p, q, alpha: float = 1.0) -> float:
    """H_α(p) + H_α(q) - 2 H_α(p ∨ q), defined for α ≥ 1 (bits)."""
    from .lattice import join

    alpha = _check_alpha(alpha)
    if alpha < 1.0 - ALPHA_ONE_WINDOW:
        raise AlphaOutOfRange(f"lattice distance needs alpha >= 1, got {alpha}")
    return renyi(p, alpha) + renyi(q, alpha) - 2.0 * renyi(join(p, q), alpha)


FUNCTIONALS = {
    "shannon": lambda p, alpha=None: shannon(p),
    "renyi": renyi,
    "tsallis": tsallis,
    "alpha_norm_pow": alpha_norm_pow,
}
