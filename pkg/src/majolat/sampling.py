"""Reproducible test inputs: simplex draws, incomparable pairs, minorizers,
rational grids and counterexample search.

Random draws come in fixed-size blocks.  Draw ``i`` of a stream is row
``i % BLOCK`` of block ``i // BLOCK``, and every block has its own generator
seeded from ``(seed, stream, d, block)``.  A draw therefore depends only on
the seed and its index, never on how many threads share the work.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from . import batch
from .core import (
    FLOAT,
    RATIONAL,
    Backend,
    ComparisonResult,
    Distribution,
    _sorted_desc,
    compare,
    make_distribution,
)
from .errors import DimensionTooSmall, ExhaustedTries, TooLarge, UnknownFunctional
from .functionals import FUNCTIONALS
from .lattice import TTransform, join, meet

BLOCK = 1024
GRID_LIMIT = 100_000
RATIONAL_SCALE = 1000

# stream tags keep unrelated uses of one seed independent
_SIMPLEX, _PAIRS, _INCOMPARABLE, _MINORIZER, _MAJORIZER, _SEARCH, _TRIPLES, _COMPARABLE = range(8)


@dataclass(frozen=True)
class SampleConfig:
    dimension: int
    seed: int = 0
    max_tries: int = 1_000_000
    grid_denominator: Optional[int] = None
    backend: Backend = field(default=FLOAT)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.max_tries < 1:
            raise ValueError("max_tries must be >= 1")


def _rng(*key: int) -> np.random.Generator:
    return np.random.default_rng([int(k) for k in key])


def _simplex_rows(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    # normalized unit exponentials are uniform on the simplex
    X = rng.exponential(size=(n, d))
    X /= X.sum(axis=1, keepdims=True)
    return batch.sort_desc(X)


@lru_cache(maxsize=64)
def _block(seed: int, stream: int, d: int, block: int, width: int) -> np.ndarray:
    rng = _rng(seed, stream, d, block)
    rows = [_simplex_rows(rng, BLOCK, d) for _ in range(width)]
    out = np.stack(rows)
    out.setflags(write=False)
    return out


def simplex_block(seed: int, d: int, block: int, stream: int = _SIMPLEX) -> np.ndarray:
    return _block(seed, stream, d, block, 1)[0]


def pair_block(seed: int, d: int, block: int, stream: int = _PAIRS):
    """Rows ``block*BLOCK ..`` of the pair stream, as two ``(BLOCK, d)`` arrays."""
    P, Q = _block(seed, stream, d, block, 2)
    return P, Q


def _to_rational(row: np.ndarray) -> Distribution:
    ks = [int(round(v * RATIONAL_SCALE)) for v in row]
    if sum(ks) == 0:
        ks[0] = 1
    total = sum(ks)
    return Distribution(_sorted_desc(Fraction(k, total) for k in ks), RATIONAL)


def _row(X: np.ndarray, backend: Backend) -> Distribution:
    if backend.exact:
        return _to_rational(X)
    return Distribution(tuple(float(v) for v in X), backend)


def sample_simplex(cfg: SampleConfig, index: int = 0) -> Distribution:
    """Draw ``index`` of the uniform-simplex stream, sorted descending.

    Under the rational backend the draw is rounded to a nearby point with
    denominator at most ``RATIONAL_SCALE * d`` and exact unit mass.
    """
    X = simplex_block(cfg.seed, cfg.dimension, index // BLOCK)
    return _row(X[index % BLOCK], cfg.backend)


def simplex_array(seed: int, d: int, count: int, stream: int = _SIMPLEX) -> np.ndarray:
    blocks = [simplex_block(seed, d, b, stream) for b in range(math.ceil(count / BLOCK))]
    return np.concatenate(blocks)[:count]


def random_pair(cfg: SampleConfig, index: int = 0):
    P, Q = pair_block(cfg.seed, cfg.dimension, index // BLOCK)
    r = index % BLOCK
    return _row(P[r], cfg.backend), _row(Q[r], cfg.backend)


def pair_arrays(seed: int, d: int, count: int, stream: int = _PAIRS):
    Ps, Qs = [], []
    for b in range(math.ceil(count / BLOCK)):
        P, Q = pair_block(seed, d, b, stream)
        Ps.append(P)
        Qs.append(Q)
    return np.concatenate(Ps)[:count], np.concatenate(Qs)[:count]


def sample_incomparable_pair(cfg: SampleConfig, index: int = 0):
    """Rejection-sample the ``index``-th independent incomparable pair."""
    if cfg.dimension < 3:
        raise DimensionTooSmall("every pair is comparable when d <= 2")
    rng = _rng(cfg.seed, _INCOMPARABLE, cfg.dimension, index)
    for _ in range(cfg.max_tries):
        P = _simplex_rows(rng, 2, cfg.dimension)
        p, q = _row(P[0], cfg.backend), _row(P[1], cfg.backend)
        if compare(p, q) is ComparisonResult.INCOMPARABLE:
            return p, q
    raise ExhaustedTries(f"no incomparable pair in {cfg.max_tries} tries")


def incomparable_arrays(seed: int, d: int, count: int):
    """The first ``count`` incomparable pairs of the pair stream, as arrays."""
    if d < 3:
        raise DimensionTooSmall("every pair is comparable when d <= 2")
    Ps, Qs, have, b = [], [], 0, 0
    while have < count:
        P, Q = pair_block(seed, d, b, _INCOMPARABLE)
        keep = batch.compare_codes(P, Q) == batch.INCOMPARABLE
        Ps.append(P[keep])
        Qs.append(Q[keep])
        have += int(keep.sum())
        b += 1
    return np.concatenate(Ps)[:count], np.concatenate(Qs)[:count]


def _random_lam(rng, backend):
    if backend.exact:
        return Fraction(int(rng.integers(0, RATIONAL_SCALE + 1)), RATIONAL_SCALE)
    return float(rng.uniform())


def random_ttransforms(rng, d: int, count: int, backend: Backend = FLOAT) -> list:
    out = []
    if d < 2:
        return out
    for _ in range(count):
        i, j = rng.choice(d, size=2, replace=False)
        out.append(TTransform(_random_lam(rng, backend), int(i), int(j)))
    return out


def sample_minorizer(p, q, cfg: SampleConfig, index: int = 0, n_transforms: Optional[int] = None):
    """A distribution majorized by both p and q.

    Applies ``n_transforms`` (default: uniform on 1..5) random T-transforms
    to the meet; each one moves further down the order.
    """
    rng = _rng(cfg.seed, _MINORIZER, cfg.dimension, index)
    k = int(rng.integers(1, 6)) if n_transforms is None else n_transforms
    r = meet(p, q)
    values = r.values
    for t in random_ttransforms(rng, r.dim, k, r.backend):
        values = t.apply(values)
    return Distribution(_sorted_desc(values), r.backend)


def sample_majorizer(p, q, cfg: SampleConfig, index: int = 0, n_moves: Optional[int] = None):
    """A distribution majorizing both p and q: move mass from small entries of the join to larger ones."""
    rng = _rng(cfg.seed, _MAJORIZER, cfg.dimension, index)
    k = int(rng.integers(1, 6)) if n_moves is None else n_moves
    r = join(p, q)
    v = list(r.values)
    for _ in range(k if len(v) > 1 else 0):
        i, j = sorted(int(x) for x in rng.choice(len(v), size=2, replace=False))
        t = _random_lam(rng, r.backend) * v[j]
        v[i] += t
        v[j] -= t
        v = list(_sorted_desc(v))
    return Distribution(tuple(v), r.backend)


def comparable_pair(cfg: SampleConfig, index: int = 0):
    """A pair (p, q) with p ≺ q: q is a simplex draw, p a random T-transform image of it."""
    rng = _rng(cfg.seed, _COMPARABLE, cfg.dimension, index)
    q = _row(_simplex_rows(rng, 1, cfg.dimension)[0], cfg.backend)
    values = q.values
    for t in random_ttransforms(rng, q.dim, int(rng.integers(1, 6)), q.backend):
        values = t.apply(values)
    return Distribution(_sorted_desc(values), q.backend), q


# -- rational grids -----------------------------------------------------------


@lru_cache(maxsize=None)
def count_partitions(n: int, parts: int) -> int:
    """Partitions of n into at most ``parts`` positive parts."""
    if n == 0:
        return 1
    if parts == 0:
        return 0
    # either fewer than `parts` parts, or subtract 1 from each of exactly `parts` parts
    return count_partitions(n, parts - 1) + (count_partitions(n - parts, parts) if n >= parts else 0)


def _partitions(n: int, largest: int, slots: int):
    if n == 0:
        yield ()
        return
    if slots == 0:
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first, slots - 1):
            yield (first,) + rest


def enumerate_grid(cfg: SampleConfig) -> list:
    """All sorted distributions in dimension d with entries in (1/n)·ℕ, exact."""
    d, n = cfg.dimension, cfg.grid_denominator
    if not n or n < 1:
        raise ValueError("grid_denominator must be a positive integer")
    total = count_partitions(n, d)
    if total > GRID_LIMIT:
        raise TooLarge(f"grid has {total} points (limit {GRID_LIMIT})")
    zero = Fraction(0)
    return [
        Distribution(tuple(Fraction(k, n) for k in part) + (zero,) * (d - len(part)), RATIONAL)
        for part in _partitions(n, n, d)
    ]


def grid_union(d: int, max_denominator: int) -> list:
    """Distinct grid points over all denominators 1..max_denominator."""
    seen = {}
    for n in range(1, max_denominator + 1):
        for r in enumerate_grid(SampleConfig(d, grid_denominator=n)):
            seen.setdefault(r.values, r)
    return list(seen.values())


# -- counterexample search ----------------------------------------------------


RELATIONS = ("supermodular", "subadditive")


@dataclass
class SearchResult:
    functional: str
    relation: str
    alpha: Optional[float]
    dimension: int
    direction: str
    threshold: float
    tries: int
    witness: Optional[tuple] = None
    witness_gap: Optional[float] = None
    witness_index: Optional[int] = None
    extreme_gap: Optional[float] = None
    extreme_pair: Optional[tuple] = None

    @property
    def found(self) -> bool:
        return self.witness is not None


def _gap_rows(P, Q, functional, relation, alpha):
    if relation == "supermodular":
        return batch.supermodular_gap(P, Q, functional, alpha)
    return batch.subadditive_gap(P, Q, functional, alpha)


def _scan_block(cfg, b, functional, relation, alpha, direction, threshold):
    P, Q = pair_block(cfg.seed, cfg.dimension, b, _SEARCH)
    n = min(BLOCK, cfg.max_tries - b * BLOCK)
    P, Q = P[:n], Q[:n]
    rows = np.flatnonzero(batch.compare_codes(P, Q) == batch.INCOMPARABLE)
    if rows.size == 0:
        return None
    gaps = _gap_rows(P[rows], Q[rows], functional, relation, alpha)
    signed = -gaps if direction == "negative" else gaps
    best = int(np.argmax(signed))
    hits = np.flatnonzero(signed > threshold)
    hit = None
    if hits.size:
        h = int(hits[0])
        hit = (b * BLOCK + int(rows[h]), P[rows[h]], Q[rows[h]], float(gaps[h]))
    return (float(gaps[best]), P[rows[best]], Q[rows[best]], hit)


def search_counterexample(
    functional: str,
    relation: str,
    alpha: Optional[float],
    cfg: SampleConfig,
    direction: str = "negative",
    threshold: float = 1e-6,
    threads: int = 1,
) -> SearchResult:
    """Look for an incomparable pair whose lattice gap has the requested sign.

    For ``relation="supermodular"`` the gap is F(m) + F(j) - F(p) - F(q); for
    ``"subadditive"`` it is F(p) + F(q) - F(m).  ``direction="negative"``
    stops at the first pair (lowest draw index) with gap < -threshold,
    ``"positive"`` at the first with gap > threshold.  At most
    ``cfg.max_tries`` pairs are drawn; not finding one is a normal outcome.
    """
    if functional not in FUNCTIONALS:
        raise UnknownFunctional(functional)
    if relation not in RELATIONS:
        raise ValueError(f"relation must be one of {RELATIONS}")
    if direction not in ("negative", "positive"):
        raise ValueError("direction must be 'negative' or 'positive'")
    if cfg.dimension < 3:
        raise DimensionTooSmall("every pair is comparable when d <= 2")
    result = SearchResult(functional, relation, alpha, cfg.dimension, direction, threshold, 0)
    n_blocks = math.ceil(cfg.max_tries / BLOCK)
    sign = -1.0 if direction == "negative" else 1.0
    wave = max(1, threads)
    with ThreadPoolExecutor(max_workers=wave) as pool:
        for start in range(0, n_blocks, wave):
            blocks = range(start, min(start + wave, n_blocks))
            outs = list(
                pool.map(
                    lambda b: _scan_block(cfg, b, functional, relation, alpha, direction, threshold),
                    blocks,
                )
            )
            # fold in block order and stop at the first block with a hit,
            # so the outcome does not depend on the wave width
            for b, out in zip(blocks, outs):
                result.tries = min(cfg.max_tries, (b + 1) * BLOCK)
                if out is None:
                    continue
                gap, p, q, hit = out
                if result.extreme_gap is None or sign * gap > sign * result.extreme_gap:
                    result.extreme_gap = gap
                    result.extreme_pair = (_row(p, FLOAT), _row(q, FLOAT))
                if hit is not None:
                    idx, hp, hq, hgap = hit
                    result.witness = (_row(hp, FLOAT), _row(hq, FLOAT))
                    result.witness_gap = hgap
                    result.witness_index = idx
                    return result
    return result


def rationalize(p: Distribution, max_denominator: int = 10**6) -> Distribution:
    """Nearby exact distribution: round each entry, then rescale to unit mass exactly."""
    approx = [Fraction(float(v)).limit_denominator(max_denominator) for v in p.values]
    total = sum(approx)
    return Distribution(_sorted_desc(a / total for a in approx), RATIONAL)


def pin_witness(result: SearchResult) -> dict:
    """Fixture record for a found witness, with the pair stored as exact rationals."""
    if not result.found:
        raise ValueError("search found no witness")
    p, q = (rationalize(v) for v in result.witness)
    record = {
        "alpha": result.alpha,
        "d": result.dimension,
        "p": p.to_json(),
        "q": q.to_json(),
        "gap": None,
        "functional": result.functional,
        "relation": result.relation,
        "direction": result.direction,
    }
    record["gap"] = witness_gap(record)
    return record


def witness_gap(record: dict) -> float:
    """Recompute a pinned witness: exact lattice part, float functional part.

    Raises ValueError if the stored pair is not exactly incomparable.
    """
    p = make_distribution(record["p"], RATIONAL)
    q = make_distribution(record["q"], RATIONAL)
    if compare(p, q) is not ComparisonResult.INCOMPARABLE:
        raise ValueError("pinned pair is not incomparable")
    f = FUNCTIONALS[record.get("functional", "renyi")]
    alpha = record["alpha"]
    m, j = meet(p, q), join(p, q)
    if record.get("relation", "supermodular") == "supermodular":
        return f(m, alpha) + f(j, alpha) - f(p, alpha) - f(q, alpha)
    return f(p, alpha) + f(q, alpha) - f(m, alpha)
