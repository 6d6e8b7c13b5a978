"""Meet, join and the direct-sum precursor relations on the majorization lattice."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import (
    ComparisonResult,
    Distribution,
    WeightVector,
    _join_backends,
    _sorted_desc,
    compare,
    direct_sum,
    equalize,
    lorenz,
    point_mass,
    tensor,
)
from .errors import DegenerateTransfer


def _aligned(p, q):
    backend = _join_backends(p, q)
    p, q = equalize(p, q)
    sp = [backend.scalar(v) for v in lorenz(p).partial_sums]
    sq = [backend.scalar(v) for v in lorenz(q).partial_sums]
    return backend, sp, sq


class _Envelope:
    """Pointwise min or max of two Lorenz curves, remembering which curve is on top.

    Increments between two points taken from the same curve are read off that
    curve's entries instead of differencing partial sums.  In floats this keeps
    small entries (and exact zeros) exact, which matters for α < 1 and for
    support checks in the divergences.
    """

    def __init__(self, p, q, upper: bool):
        self.backend, sp, sq = _aligned(p, q)
        p, q = equalize(p, q)
        self.entries = (
            [self.backend.scalar(v) for v in p.values],
            [self.backend.scalar(v) for v in q.values],
        )
        self.upper = upper
        pick = max if upper else min
        self.s = [pick(a, b) for a, b in zip(sp, sq)]
        # which curves attain the envelope at k: bit 1 = p, bit 2 = q
        self.owners = [(1 if a == v else 0) | (2 if b == v else 0) for a, b, v in zip(sp, sq, self.s)]

    def rise(self, a: int, b: int):
        """s[b] - s[a], exact when one curve attains both ends."""
        shared = self.owners[a] & self.owners[b]
        if not shared:
            return self.s[b] - self.s[a]
        rises = [self._sum(self.entries[i][a:b]) for i in (0, 1) if shared & (1 << i)]
        # both curves tie at both ends: equal in exact arithmetic, so any gap is
        # rounding; min for the lower envelope and max for the upper keeps
        # meet ⊕ beta a rearrangement of p ⊕ q
        return max(rises) if self.upper else min(rises)

    def _sum(self, seg):
        if self.backend.exact:
            return sum(seg, self.backend.scalar(0))
        return math.fsum(seg)

    def increments(self) -> list:
        return [self.rise(k, k + 1) for k in range(len(self.s) - 1)]


def meet(p: Distribution, q: Distribution) -> Distribution:
    """Greatest lower bound: difference the pointwise minimum of the Lorenz curves."""
    env = _Envelope(p, q, upper=False)
    # the min of two concave curves is concave, so this sort only fixes float noise
    return Distribution(_sorted_desc(env.increments()), env.backend)


def beta(p: Distribution, q: Distribution) -> WeightVector:
    """Differences of the pointwise-max Lorenz curve, in index order.

    Unlike every other WeightVector this one is *not* sorted: the max of two
    concave curves can have convex dents, which show up as increments that
    go up again.
    """
    env = _Envelope(p, q, upper=True)
    return WeightVector(tuple(env.increments()), env.backend)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def upper_hull(points: Sequence[tuple]) -> list:
    """Upper convex hull of points already sorted by x (monotone chain).

    Collinear middle points are dropped.
    """
    hull: list = []
    for pt in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) >= 0:
            hull.pop()
        hull.append(pt)
    return hull


def least_concave_majorant(ys: Sequence) -> list:
    """Values at x = 0..n of the least concave function above (k, ys[k])."""
    hull = upper_hull(list(enumerate(ys)))
    out = [hull[0][1]]
    for (xa, ya), (xb, yb) in zip(hull, hull[1:]):
        slope = (yb - ya) / (xb - xa)
        for step in range(1, xb - xa + 1):
            out.append(ya + slope * step)
    return out


def join(p: Distribution, q: Distribution) -> Distribution:
    """Least upper bound.

    The pointwise max of the two Lorenz curves is replaced by its least
    concave majorant; the join's entries are the slopes of that envelope.
    """
    env = _Envelope(p, q, upper=True)
    hull = upper_hull(list(enumerate(env.s)))
    values = []
    for (xa, _), (xb, _) in zip(hull, hull[1:]):
        values.extend([env.rise(xa, xb) / (xb - xa)] * (xb - xa))
    return Distribution(_sorted_desc(values), env.backend)


@dataclass(frozen=True)
class MeetJoinPair:
    meet: Distribution
    join: Distribution
    beta_raw: WeightVector


def meet_join(p: Distribution, q: Distribution) -> MeetJoinPair:
    return MeetJoinPair(meet(p, q), join(p, q), beta(p, q))


@dataclass(frozen=True)
class TTransform:
    """``lam * I + (1 - lam) * P_ij`` acting on positions i and j (0-based)."""

    lam: object
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("a T-transform needs two distinct positions")
        if not 0 <= self.lam <= 1:
            raise ValueError(f"lam={self.lam} outside [0, 1]")

    def apply(self, values: Sequence) -> tuple:
        v = list(values)
        a, b = v[self.i], v[self.j]
        v[self.i] = self.lam * a + (1 - self.lam) * b
        v[self.j] = self.lam * b + (1 - self.lam) * a
        return tuple(v)


def apply_ttransforms(values: Sequence, transforms: Sequence[TTransform]) -> tuple:
    out = tuple(values)
    for t in transforms:
        out = t.apply(out)
    return out


def decompose_ttransforms(p: Distribution, q: Distribution) -> list:
    """T-transforms taking the unsorted concatenation (p, q) to (meet, beta).

    Positions ``0..d-1`` hold p and ``d..2d-1`` hold q.  Where the prefix-sum
    ordering of p and q persists from index k to k+1, entry k of meet and of
    beta is already one of p[k], q[k] and nothing is emitted.  Where it flips,
    the lagging gap ``delta`` is transferred from the larger of p[k], q[k] to
    the smaller, which is a T-transform on positions (k, d + k).
    """
    backend, sp, sq = _aligned(p, q)
    p, q = equalize(p, q)
    d = p.dim
    pv = [backend.scalar(v) for v in p.values]
    qv = [backend.scalar(v) for v in q.values]
    out = []
    for k in range(d):
        if sp[k] >= sq[k]:
            delta = sp[k] - sq[k]
            flipped = sp[k + 1] < sq[k + 1]
            spread = qv[k] - pv[k]
        else:
            delta = sq[k] - sp[k]
            flipped = sq[k + 1] < sp[k + 1]
            spread = pv[k] - qv[k]
        if not flipped or delta == 0:
            continue
        if spread <= 0:
            raise DegenerateTransfer(f"no room to transfer {delta} at index {k}")
        lam = 1 - delta / spread
        if not backend.exact:
            # rounding can push lam a hair outside [0, 1]
            lam = min(max(lam, 0.0), 1.0)
        out.append(TTransform(lam, k, d + k))
    return out


def precursor_supermodular(p: Distribution, q: Distribution) -> ComparisonResult:
    """Relation of (meet ⊕ join) to (p ⊕ q); always FIRST_MAJORIZED or EQUAL."""
    return compare(direct_sum(meet(p, q), join(p, q)), direct_sum(p, q))


def precursor_subadditive(p: Distribution, q: Distribution) -> ComparisonResult:
    """Relation of (p ⊕ q) to (meet ⊕ e), with e the point mass in dimension d."""
    m = meet(p, q)
    e = point_mass(m.dim, m.backend)
    return compare(direct_sum(p, q), direct_sum(m, e))


def precursor_tensor(p: Distribution, q: Distribution) -> ComparisonResult:
    """Relation of p ⊗ q to meet(p, q), the latter padded to d²."""
    return compare(tensor(p, q), meet(p, q))
