"""Probability vectors, the majorization pre-order and Lorenz curves.

Two numeric backends share one code path: ``FLOAT`` (binary64 with an
absolute tolerance on prefix sums) and ``RATIONAL`` (``fractions.Fraction``,
exact).  Lattice operations only add, subtract and compare, so they are
written once and run unchanged on either scalar type.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Iterator, Sequence, Union

from .errors import EmptyVector, MassNotOne, MassNotTwo, NegativeEntry, TargetTooSmall

Scalar = Union[float, Fraction]

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Backend:
    mode: str = "float"
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.mode not in ("float", "rational"):
            raise ValueError(f"unknown backend mode {self.mode!r}")
        if self.mode == "float" and not self.tolerance > 0:
            raise ValueError("float backend needs a positive tolerance")

    @property
    def exact(self) -> bool:
        return self.mode == "rational"

    @property
    def tol(self):
        return 0 if self.exact else self.tolerance

    def scalar(self, x) -> Scalar:
        """Convert one raw entry (number or ``"num/den"`` string) to this backend's type."""
        if self.exact:
            if isinstance(x, Fraction):
                return x
            if isinstance(x, float):
                # decimal reading: 0.1 -> 1/10, not the binary64 expansion
                return Fraction(repr(x))
            return Fraction(x)
        if isinstance(x, str):
            return float(Fraction(x))
        return float(x)


FLOAT = Backend("float")
RATIONAL = Backend("rational")


def get_backend(name: str) -> Backend:
    return RATIONAL if name == "rational" else FLOAT


def _join_backends(*vectors) -> Backend:
    # float wins: a float operand makes exact arithmetic pointless
    for v in vectors:
        if not v.backend.exact:
            return v.backend
    return vectors[0].backend


class _Vector:
    values: tuple
    backend: Backend

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self.values)

    def __getitem__(self, k):
        return self.values[k]

    @property
    def dim(self) -> int:
        return len(self.values)

    def to_float(self) -> tuple:
        return tuple(float(v) for v in self.values)

    def to_json(self) -> list:
        return [_json_scalar(v) for v in self.values]


@dataclass(frozen=True)
class Distribution(_Vector):
    """A point of the sorted simplex: non-negative, non-increasing, unit mass.

    Build instances with :func:`make_distribution`; the constructor itself
    does not validate.
    """

    values: tuple
    backend: Backend = FLOAT

    def __repr__(self) -> str:
        return f"Distribution({list(self.to_json())})"


@dataclass(frozen=True)
class WeightVector(_Vector):
    """Sorted non-negative vector with arbitrary total (direct sums have total 2)."""

    values: tuple
    backend: Backend = FLOAT

    @property
    def total(self) -> Scalar:
        return sum(self.values, self.backend.scalar(0))

    def __repr__(self) -> str:
        return f"WeightVector({list(self.to_json())})"


@dataclass(frozen=True)
class LorenzCurve:
    partial_sums: tuple

    @property
    def n(self) -> int:
        return len(self.partial_sums) - 1

    def at(self, k: int) -> Scalar:
        # beyond the last index the curve stays at the total mass
        if k < 0:
            raise IndexError(k)
        return self.partial_sums[min(k, self.n)]


class ComparisonResult(enum.Enum):
    EQUAL = "equal"
    FIRST_MAJORIZED = "first_majorized"
    SECOND_MAJORIZED = "second_majorized"
    INCOMPARABLE = "incomparable"

    @property
    def comparable(self) -> bool:
        return self is not ComparisonResult.INCOMPARABLE

    def flipped(self) -> "ComparisonResult":
        if self is ComparisonResult.FIRST_MAJORIZED:
            return ComparisonResult.SECOND_MAJORIZED
        if self is ComparisonResult.SECOND_MAJORIZED:
            return ComparisonResult.FIRST_MAJORIZED
        return self


def _sorted_desc(values: Iterable[Scalar]) -> tuple:
    # sorted() is stable, so ties keep input order
    return tuple(sorted(values, reverse=True))


def make_distribution(raw: Sequence, backend: Backend = FLOAT) -> Distribution:
    """Validate ``raw`` and return it as a sorted :class:`Distribution`.

    Entries in ``[-tol, 0)`` are clamped to zero.  Off-simplex input is
    rejected; nothing is renormalized.
    """
    if isinstance(raw, _Vector):
        raw = raw.values
    if len(raw) == 0:
        raise EmptyVector("distribution needs at least one entry")
    tol = backend.tol
    values = []
    for x in raw:
        v = backend.scalar(x)
        if v < -tol:
            raise NegativeEntry(f"entry {x} is negative")
        values.append(v if v > 0 else backend.scalar(0))
    total = sum(values, backend.scalar(0))
    if abs(total - 1) > tol:
        raise MassNotOne(f"entries sum to {total}, not 1")
    return Distribution(_sorted_desc(values), backend)


def point_mass(d: int, backend: Backend = FLOAT) -> Distribution:
    """The most concentrated distribution e = (1, 0, ..., 0)."""
    one, zero = backend.scalar(1), backend.scalar(0)
    return Distribution((one,) + (zero,) * (d - 1), backend)


def uniform(d: int, backend: Backend = FLOAT) -> Distribution:
    u = Fraction(1, d) if backend.exact else 1.0 / d
    return Distribution((u,) * d, backend)


def pad(p, d_target: int):
    """Append zeros up to ``d_target`` entries (works on both vector types)."""
    if d_target < p.dim:
        raise TargetTooSmall(f"cannot pad dimension {p.dim} down to {d_target}")
    zero = p.backend.scalar(0)
    return type(p)(p.values + (zero,) * (d_target - p.dim), p.backend)


def equalize(p, q):
    d = max(p.dim, q.dim)
    return pad(p, d), pad(q, d)


def lorenz(v) -> LorenzCurve:
    zero = v.backend.scalar(0)
    return LorenzCurve((zero,) + tuple(accumulate(v.values)))


def compare(p, q) -> ComparisonResult:
    """Four-valued majorization comparison of two sorted vectors.

    ``FIRST_MAJORIZED`` means p ≺ q: every prefix sum of p is at most the
    matching prefix sum of q, and the totals agree.
    """
    tol = _join_backends(p, q).tol
    p, q = equalize(p, q)
    sp, sq = lorenz(p).partial_sums, lorenz(q).partial_sums
    if abs(sp[-1] - sq[-1]) > tol:
        return ComparisonResult.INCOMPARABLE
    p_below = q_below = True
    for a, b in zip(sp[1:], sq[1:]):
        if a - b > tol:
            p_below = False
        if b - a > tol:
            q_below = False
    if p_below and q_below:
        return ComparisonResult.EQUAL
    if p_below:
        return ComparisonResult.FIRST_MAJORIZED
    if q_below:
        return ComparisonResult.SECOND_MAJORIZED
    return ComparisonResult.INCOMPARABLE


def majorized_by(p, q) -> bool:
    """True when p ≺ q (equality included)."""
    return compare(p, q) in (ComparisonResult.EQUAL, ComparisonResult.FIRST_MAJORIZED)


def direct_sum(p, q) -> WeightVector:
    backend = _join_backends(p, q)
    p, q = equalize(p, q)
    values = [backend.scalar(v) for v in p.values + q.values]
    return WeightVector(_sorted_desc(values), backend)


def tensor(p, q) -> Distribution:
    backend = _join_backends(p, q)
    values = [backend.scalar(a) * backend.scalar(b) for a in p.values for b in q.values]
    return Distribution(_sorted_desc(values), backend)


def halve(w: WeightVector) -> Distribution:
    if abs(w.total - 2) > w.backend.tol:
        raise MassNotTwo(f"total is {w.total}, expected 2")
    two = w.backend.scalar(2)
    return Distribution(tuple(v / two for v in w.values), w.backend)


def as_backend(p, backend: Backend):
    """Re-express a vector's entries in another backend (no validation)."""
    return type(p)(tuple(backend.scalar(v) for v in p.values), backend)


# -- serialization -----------------------------------------------------------


def _json_scalar(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v.numerator)
    return float(v)


def parse_distribution(text: Union[str, Sequence], backend: Backend = FLOAT) -> Distribution:
    """Parse a JSON array (or an already-decoded list) into a distribution."""
    raw = json.loads(text) if isinstance(text, str) else text
    if not isinstance(raw, list):
        raise ValueError("a distribution must be a JSON array")
    return make_distribution(raw, backend)


def dumps(v) -> str:
    if isinstance(v, _Vector):
        return json.dumps(v.to_json(), separators=(",", ":"))
    return json.dumps(_json_scalar(v) if isinstance(v, Fraction) else v)


def read_jsonl(path, backend: Backend = FLOAT) -> list:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(parse_distribution(line, backend))
    return out


def prefix_slack(x, y):
    """Smallest gap ``S_k(y) - S_k(x)`` over k >= 1, with the k where it occurs.

    Non-negative exactly when x ≺ y (given equal totals).  Returns
    ``(gap, k, S_k(y), S_k(x))``.
    """
    x, y = equalize(x, y)
    sx, sy = lorenz(x).partial_sums, lorenz(y).partial_sums
    best = None
    for k in range(1, len(sx)):
        g = sy[k] - sx[k]
        if best is None or g < best[0]:
            best = (g, k, sy[k], sx[k])
    return best
