"""Evaluate the lattice inequalities (with their correction terms) and report on them.

Every check returns an :class:`InequalityReport` oriented so that
``gap = lhs - rhs >= 0`` is the claimed inequality.  A check passes when
``gap >= -tol``; gaps in ``[-tol, 0)`` still pass but count as near misses.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import batch
from .core import (
    DEFAULT_TOLERANCE,
    FLOAT,
    Backend,
    ComparisonResult,
    compare,
    direct_sum,
    halve,
    point_mass,
    prefix_slack,
    tensor,
)
from .errors import AlphaOutOfRange, UnknownFunctional, UnknownInequality, VerdictMismatch
from .functionals import LOG2E, alpha_norm_pow, kl, lattice_distance, renyi, shannon, tsallis, w_phi
from .lattice import join, meet
from .sampling import _PAIRS, _TRIPLES, BLOCK, _block, _row

log = logging.getLogger(__name__)

TOL = DEFAULT_TOLERANCE


class InequalityId(str, enum.Enum):
    THM1 = "Thm1"
    THM2 = "Thm2"
    LEM2 = "Lem2"
    COR1_SUPERMOD = "Cor1_supermod"
    COR2_SUBADD = "Cor2_subadd"
    COR3_ETA = "Cor3_eta"
    COR4_ETA = "Cor4_eta"
    COR6_TAU = "Cor6_tau"
    COR7_TAU = "Cor7_tau"
    COR8_RENYI_SUPERMOD = "Cor8_renyi_supermod"
    COR9_RENYI_ETA = "Cor9_renyi_eta"
    LOG_SUBMOD = "LogSubmod"
    DISTANCE_TRIANGLE = "DistanceTriangle"

    @classmethod
    def parse(cls, text: str) -> "InequalityId":
        """Accept the full id or its short prefix (``Cor3`` for ``Cor3_eta``), case-insensitively."""
        key = text.strip().lower()
        for member in cls:
            v = member.value.lower()
            if key == v or key == v.split("_")[0]:
                return member
        raise UnknownInequality(text)


PRECURSORS = (InequalityId.THM1, InequalityId.THM2, InequalityId.LEM2)

DEFAULT_ALPHAS = {
    InequalityId.COR6_TAU: (2.0,),
    InequalityId.COR7_TAU: (2.0,),
    InequalityId.COR8_RENYI_SUPERMOD: (2.0,),
    InequalityId.COR9_RENYI_ETA: (2.0,),
    InequalityId.LOG_SUBMOD: (2.0,),
    InequalityId.DISTANCE_TRIANGLE: (1.0,),
}


def is_universal(inequality_id: InequalityId, alpha: Optional[float]) -> bool:
    """Whether a failure would contradict a proven statement.

    The Rényi subadditivity refinement rests on a refinement lemma whose
    range below α = 1 is not established, so it is recorded there but not
    treated as a theorem.
    """
    if inequality_id is InequalityId.COR9_RENYI_ETA and alpha is not None and alpha < 1:
        return False
    return True


@dataclass(frozen=True)
class InequalityReport:
    inequality_id: InequalityId
    lhs: float
    rhs: float
    gap: float
    correction: float
    comparability: ComparisonResult
    alpha: Optional[float]
    passed: bool
    dim: int
    refined: bool = True
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def near_miss(self) -> bool:
        return self.passed and self.gap < 0


def _report(iid, lhs, rhs, correction, cmp, alpha, dim, tol, refined=True, detail=None):
    gap = lhs - rhs
    return InequalityReport(
        iid, lhs, rhs, gap, correction, cmp, alpha, bool(gap >= -tol), dim, refined, detail or {}
    )


def _refined(iid, base_lhs, base_rhs, correction, cmp, alpha, dim, tol, detail=None):
    """Report for ``base_lhs >= base_rhs + correction``, falling back to the bare
    inequality when the correction is infinite (support mismatch)."""
    if math.isinf(correction):
        return _report(iid, base_lhs, base_rhs, correction, cmp, alpha, dim, tol, False, detail)
    return _report(iid, base_lhs, base_rhs + correction, correction, cmp, alpha, dim, tol, True, detail)


# -- majorization precursors --------------------------------------------------


def _precursor(iid, smaller, larger, p, q):
    gap, k, big, small = prefix_slack(smaller, larger)
    rel = compare(smaller, larger)
    passed = rel in (ComparisonResult.EQUAL, ComparisonResult.FIRST_MAJORIZED)
    return InequalityReport(
        iid, float(big), float(small), float(gap), 0.0, compare(p, q), None, passed,
        max(p.dim, q.dim), True, {"relation": rel.value, "k": k},
    )


def check_thm1(p, q) -> InequalityReport:
    """(p ∧ q) ⊕ (p ∨ q) ≺ p ⊕ q."""
    return _precursor(InequalityId.THM1, direct_sum(meet(p, q), join(p, q)), direct_sum(p, q), p, q)


def check_thm2(p, q) -> InequalityReport:
    """p ⊕ q ≺ (p ∧ q) ⊕ e."""
    m = meet(p, q)
    return _precursor(InequalityId.THM2, direct_sum(p, q), direct_sum(m, point_mass(m.dim, m.backend)), p, q)


def check_lem2(p, q) -> InequalityReport:
    """p ⊗ q ≺ p ∧ q."""
    return _precursor(InequalityId.LEM2, tensor(p, q), meet(p, q), p, q)


# -- sum-concave functionals -------------------------------------------------


def _sum_functional(name: str, alpha):
    """Return (F, concave?) for a sum-of-φ functional."""
    if name == "shannon":
        return shannon, True
    if name == "tsallis":
        return (lambda x: tsallis(x, alpha)), True
    if name == "alpha_norm_pow":
        if alpha is None:
            raise AlphaOutOfRange("alpha_norm_pow needs alpha")
        return (lambda x: alpha_norm_pow(x, alpha)), alpha <= 1
    raise UnknownFunctional(f"{name!r} is not a sum-concave functional")


def check_sum_concave_supermod(functional: str, p, q, alpha=None, tol=TOL) -> InequalityReport:
    """F(m) + F(j) >= F(p) + F(q) for sum-concave F.

    ``alpha_norm_pow`` with α > 1 is sum-convex, so the inequality is checked
    the other way round (submodularity).
    """
    F, concave = _sum_functional(functional, alpha)
    m, j = meet(p, q), join(p, q)
    lattice_side, pair_side = F(m) + F(j), F(p) + F(q)
    lhs, rhs = (lattice_side, pair_side) if concave else (pair_side, lattice_side)
    return _report(InequalityId.COR1_SUPERMOD, lhs, rhs, 0.0, compare(p, q), alpha, m.dim, tol,
                   detail={"functional": functional})


def check_sum_concave_subadd(functional: str, p, q, alpha=None, tol=TOL) -> InequalityReport:
    """F(m) <= F(p) + F(q) - F(e) for sum-concave F (reversed for sum-convex F)."""
    F, concave = _sum_functional(functional, alpha)
    m = meet(p, q)
    f_e = F(point_mass(m.dim))
    bound, value = F(p) + F(q) - f_e, F(m)
    lhs, rhs = (bound, value) if concave else (value, bound)
    return _report(InequalityId.COR2_SUBADD, lhs, rhs, 0.0, compare(p, q), alpha, m.dim, tol,
                   detail={"functional": functional, "F_e": f_e})


# -- refined entropy inequalities ------------------------------------------------


def check_shannon_supermod_refined(p, q, tol=TOL) -> InequalityReport:
    m, j = meet(p, q), join(p, q)
    eta = 2.0 * kl(halve(direct_sum(p, q)), halve(direct_sum(m, j)))
    return _refined(InequalityId.COR3_ETA, shannon(m) + shannon(j), shannon(p) + shannon(q),
                    eta, compare(p, q), None, m.dim, tol)


def check_shannon_subadd_refined(p, q, tol=TOL) -> InequalityReport:
    m = meet(p, q)
    e = point_mass(m.dim)
    via_tensor = kl(m, tensor(p, q))
    via_sum = 2.0 * kl(halve(direct_sum(m, e)), halve(direct_sum(p, q)))
    eta = max(via_tensor, via_sum)
    return _refined(InequalityId.COR4_ETA, shannon(p) + shannon(q), shannon(m), eta, compare(p, q),
                    None, m.dim, tol, {"kl_tensor": via_tensor, "kl_direct_sum": via_sum})


def check_tsallis_supermod_refined(p, q, alpha, tol=TOL) -> InequalityReport:
    m, j = meet(p, q), join(p, q)
    tau = 2.0**alpha * w_phi(halve(direct_sum(p, q)), halve(direct_sum(m, j)), alpha)
    return _refined(InequalityId.COR6_TAU, tsallis(m, alpha) + tsallis(j, alpha),
                    tsallis(p, alpha) + tsallis(q, alpha), tau, compare(p, q), alpha, m.dim, tol)


def check_tsallis_subadd_refined(p, q, alpha, tol=TOL) -> InequalityReport:
    m = meet(p, q)
    e = point_mass(m.dim)
    tau = 2.0**alpha * w_phi(halve(direct_sum(m, e)), halve(direct_sum(p, q)), alpha)
    return _refined(InequalityId.COR7_TAU, tsallis(p, alpha) + tsallis(q, alpha), tsallis(m, alpha),
                    tau, compare(p, q), alpha, m.dim, tol)


def check_renyi_supermod(p, q, alpha, tol=TOL) -> InequalityReport:
    """H_α(m) + H_α(j) >= H_α(p) + H_α(q) for α > 1, cross-checked in product form.

    The product form is ‖p‖‖q‖ >= ‖m‖‖j‖ with ‖·‖ = Σ x^α; both verdicts must
    agree or :class:`VerdictMismatch` is raised.
    """
    if not alpha > 1:
        raise AlphaOutOfRange(f"Renyi supermodularity needs alpha > 1, got {alpha}")
    m, j = meet(p, q), join(p, q)
    rep = _report(InequalityId.COR8_RENYI_SUPERMOD, renyi(m, alpha) + renyi(j, alpha),
                  renyi(p, alpha) + renyi(q, alpha), 0.0, compare(p, q), alpha, m.dim, tol)
    prod = check_log_submod(p, q, alpha, tol)
    # compare on the log scale so both verdicts use the same tolerance
    log_gap = (math.log2(prod.lhs) - math.log2(prod.rhs)) / (alpha - 1.0)
    if (log_gap >= -tol) != rep.passed:
        raise VerdictMismatch(f"entropy gap {rep.gap} vs product gap {prod.gap}")
    rep.detail.update(norm_product_lhs=prod.lhs, norm_product_rhs=prod.rhs)
    return rep


def check_log_submod(p, q, alpha, tol=TOL) -> InequalityReport:
    if not alpha > 1:
        raise AlphaOutOfRange(f"log-submodularity needs alpha > 1, got {alpha}")
    m, j = meet(p, q), join(p, q)
    lhs = alpha_norm_pow(p, alpha) * alpha_norm_pow(q, alpha)
    rhs = alpha_norm_pow(m, alpha) * alpha_norm_pow(j, alpha)
    return _report(InequalityId.LOG_SUBMOD, lhs, rhs, 0.0, compare(p, q), alpha, m.dim, tol)


def check_renyi_subadd_refined(p, q, alpha, tol=TOL) -> InequalityReport:
    m = meet(p, q)
    eta = LOG2E * w_phi(m, tensor(p, q), alpha)
    return _refined(InequalityId.COR9_RENYI_ETA, renyi(p, alpha) + renyi(q, alpha), renyi(m, alpha),
                    eta, compare(p, q), alpha, m.dim, tol)


def check_distance_triangle(p, q, r, alpha=1.0, tol=TOL) -> InequalityReport:
    """d(p, r) <= d(p, q) + d(q, r) for the entropy-based lattice distance."""
    lhs = lattice_distance(p, q, alpha) + lattice_distance(q, r, alpha)
    rhs = lattice_distance(p, r, alpha)
    return _report(InequalityId.DISTANCE_TRIANGLE, lhs, rhs, 0.0, compare(p, r), alpha,
                   max(p.dim, q.dim, r.dim), tol)


def check(inequality_id, p, q, alpha=None, r=None, functional="shannon", tol=TOL) -> InequalityReport:
    """Dispatch on an inequality id."""
    iid = inequality_id if isinstance(inequality_id, InequalityId) else InequalityId.parse(inequality_id)
    if iid is InequalityId.THM1:
        return check_thm1(p, q)
    if iid is InequalityId.THM2:
        return check_thm2(p, q)
    if iid is InequalityId.LEM2:
        return check_lem2(p, q)
    if iid is InequalityId.COR1_SUPERMOD:
        return check_sum_concave_supermod(functional, p, q, alpha, tol)
    if iid is InequalityId.COR2_SUBADD:
        return check_sum_concave_subadd(functional, p, q, alpha, tol)
    if iid is InequalityId.COR3_ETA:
        return check_shannon_supermod_refined(p, q, tol)
    if iid is InequalityId.COR4_ETA:
        return check_shannon_subadd_refined(p, q, tol)
    if iid is InequalityId.COR6_TAU:
        return check_tsallis_supermod_refined(p, q, alpha, tol)
    if iid is InequalityId.COR7_TAU:
        return check_tsallis_subadd_refined(p, q, alpha, tol)
    if iid is InequalityId.COR8_RENYI_SUPERMOD:
        return check_renyi_supermod(p, q, alpha, tol)
    if iid is InequalityId.COR9_RENYI_ETA:
        return check_renyi_subadd_refined(p, q, alpha, tol)
    if iid is InequalityId.LOG_SUBMOD:
        return check_log_submod(p, q, alpha, tol)
    if r is None:
        raise ValueError("DistanceTriangle needs a third distribution")
    return check_distance_triangle(p, q, r, alpha, tol)


# -- batches --------------------------------------------------------------------


@dataclass
class BatchResult:
    reports: list
    summary: dict


def _alpha_grid(iid, alpha_grid, functional):
    if alpha_grid:
        return tuple(float(a) for a in alpha_grid)
    if iid in (InequalityId.COR1_SUPERMOD, InequalityId.COR2_SUBADD) and functional != "shannon":
        return (2.0,)
    return DEFAULT_ALPHAS.get(iid, (None,))


def _block_reports(iid, d, seed, b, count, alpha, backend, functional, tol):
    width = 3 if iid is InequalityId.DISTANCE_TRIANGLE else 2
    stream = _TRIPLES if width == 3 else _PAIRS
    rows = _block(seed, stream, d, b, width)
    n = min(BLOCK, count - b * BLOCK)
    out = []
    for i in range(n):
        dists = [_row(rows[w][i], backend) for w in range(width)]
        r = dists[2] if width == 3 else None
        out.append(check(iid, dists[0], dists[1], alpha, r, functional, tol))
    return out


def batch_verify(
    inequality_id,
    dimension: int,
    count: int,
    seed: int,
    alpha_grid: Optional[Sequence[float]] = None,
    threads: int = 1,
    backend: Backend = FLOAT,
    functional: str = "shannon",
    tol: float = TOL,
) -> BatchResult:
    """Check one inequality on ``count`` random pairs per α in the grid.

    Pairs are draws ``0..count-1`` of the seeded pair stream (triples for
    the triangle inequality), so the output does not depend on ``threads``.
    """
    iid = inequality_id if isinstance(inequality_id, InequalityId) else InequalityId.parse(inequality_id)
    if count < 1:
        raise ValueError("count must be >= 1")
    if backend.exact and iid not in PRECURSORS:
        raise ValueError(f"{iid.value} involves logarithms; use the float backend")
    alphas = _alpha_grid(iid, alpha_grid, functional)
    n_blocks = math.ceil(count / BLOCK)
    reports = []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for alpha in alphas:
            chunks = pool.map(
                lambda b: _block_reports(iid, dimension, seed, b, count, alpha, backend, functional, tol),
                range(n_blocks),
            )
            for chunk in chunks:
                reports.extend(chunk)
    summary = summarize(reports, seed=seed, count=count, functional=functional)
    return BatchResult(reports, summary)


def summarize(reports: Sequence[InequalityReport], **extra) -> dict:
    """Pass rate, near misses and the minimal-gap witness of a report list."""
    by_alpha: dict = {}
    worst = None
    for idx, rep in enumerate(reports):
        slot = by_alpha.setdefault(rep.alpha, {"count": 0, "passed": 0, "min_gap": math.inf})
        slot["count"] += 1
        slot["passed"] += rep.passed
        slot["min_gap"] = min(slot["min_gap"], rep.gap)
        if worst is None or rep.gap < reports[worst].gap:
            worst = idx
        if rep.near_miss:
            log.info("near miss: %s alpha=%s gap=%.3e", rep.inequality_id.value, rep.alpha, rep.gap)
    total = len(reports)
    passed = sum(r.passed for r in reports)
    universal_ok = all(r.passed for r in reports if is_universal(r.inequality_id, r.alpha))
    summary = {
        "inequality_id": reports[0].inequality_id.value if reports else None,
        "d": reports[0].dim if reports else None,
        **extra,
        "total": total,
        "passed": passed,
        "pass_rate": passed / total if total else 0.0,
        "near_misses": sum(r.near_miss for r in reports),
        "not_refined": sum(not r.refined for r in reports),
        "min_gap": reports[worst].gap if reports else None,
        "argmin": None,
        "per_alpha": [
            {"alpha": a, **{k: v for k, v in s.items()}, "pass_rate": s["passed"] / s["count"]}
            for a, s in by_alpha.items()
        ],
        "all_universal_passed": universal_ok,
    }
    if reports:
        summary["argmin"] = {"index": worst, "alpha": reports[worst].alpha}
    return summary


def attach_argmin_pair(summary: dict, seed: int, backend: Backend = FLOAT) -> dict:
    """Add the distributions behind the minimal-gap report (for regression pinning)."""
    arg = summary.get("argmin")
    if not arg:
        return summary
    iid = InequalityId.parse(summary["inequality_id"])
    count = summary["count"]
    i = arg["index"] % count
    width = 3 if iid is InequalityId.DISTANCE_TRIANGLE else 2
    rows = _block(seed, _TRIPLES if width == 3 else _PAIRS, summary["d"], i // BLOCK, width)
    arg["pair"] = [_row(rows[w][i % BLOCK], backend).to_json() for w in range(width)]
    return summary


# -- serialization --------------------------------------------------------------

CSV_COLUMNS = ("inequality_id", "d", "alpha", "lhs", "rhs", "correction", "gap", "comparability", "passed")


def _fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.9g}"


def report_row(rep: InequalityReport) -> list:
    return [
        rep.inequality_id.value,
        str(rep.dim),
        _fmt(rep.alpha),
        _fmt(rep.lhs),
        _fmt(rep.rhs),
        _fmt(rep.correction),
        _fmt(rep.gap),
        rep.comparability.value,
        "true" if rep.passed else "false",
    ]


def write_csv(reports: Sequence[InequalityReport], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        writer.writerow(report_row(rep))


def csv_text(reports: Sequence[InequalityReport]) -> str:
    buf = io.StringIO()
    write_csv(reports, buf)
    return buf.getvalue()


def read_csv(fh) -> list:
    """Rows of a report CSV as dicts with numeric fields decoded."""
    rows = []
    for row in csv.DictReader(fh):
        if tuple(row) != CSV_COLUMNS:
            raise ValueError("not a report CSV: unexpected columns")
        rows.append({
            "inequality_id": row["inequality_id"],
            "d": int(row["d"]),
            "alpha": float(row["alpha"]) if row["alpha"] else None,
            "lhs": float(row["lhs"]),
            "rhs": float(row["rhs"]),
            "correction": float(row["correction"]),
            "gap": float(row["gap"]),
            "comparability": row["comparability"],
            "passed": row["passed"] == "true",
        })
    return rows


def summarize_rows(rows: Sequence[dict]) -> dict:
    """Summary of a report CSV, grouped by (inequality, d, alpha)."""
    groups: dict = {}
    for r in rows:
        key = (r["inequality_id"], r["d"], r["alpha"])
        g = groups.setdefault(key, {"count": 0, "passed": 0, "min_gap": math.inf,
                                    "incomparable": 0, "min_correction_incomparable": None})
        g["count"] += 1
        g["passed"] += r["passed"]
        g["min_gap"] = min(g["min_gap"], r["gap"])
        if r["comparability"] == ComparisonResult.INCOMPARABLE.value:
            g["incomparable"] += 1
            c = g["min_correction_incomparable"]
            g["min_correction_incomparable"] = r["correction"] if c is None else min(c, r["correction"])
    return {
        "groups": [
            {"inequality_id": k[0], "d": k[1], "alpha": k[2], **v, "pass_rate": v["passed"] / v["count"]}
            for k, v in groups.items()
        ],
        "total": len(rows),
        "passed": sum(r["passed"] for r in rows),
    }


def dump_json(obj, fh) -> None:
    # json writes repr() of floats, which round-trips binary64 exactly
    json.dump(obj, fh, indent=2, sort_keys=False, default=str)
    fh.write("\n")


# -- vectorized precursor sweeps -------------------------------------------------


def precursor_codes(inequality_id, P: np.ndarray, Q: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Comparison codes (see :mod:`majolat.batch`) of the precursor relation, row by row.

    A row satisfies the claimed relation when its code is EQUAL or FIRST.
    """
    iid = inequality_id if isinstance(inequality_id, InequalityId) else InequalityId.parse(inequality_id)
    M = batch.meet(P, Q)
    if iid is InequalityId.THM1:
        return batch.compare_codes(batch.direct_sum(M, batch.join(P, Q)), batch.direct_sum(P, Q), tol)
    if iid is InequalityId.THM2:
        E = batch.point_masses(P.shape[0], M.shape[1])
        return batch.compare_codes(batch.direct_sum(P, Q), batch.direct_sum(M, E), tol)
    if iid is InequalityId.LEM2:
        return batch.compare_codes(batch.tensor(P, Q), M, tol)
    raise UnknownInequality(f"{iid.value} is not a majorization precursor")


def precursor_sweep(inequality_id, d: int, count: int, seed: int, tol: float = TOL, chunk: int = 16 * BLOCK) -> dict:
    """Run a precursor relation on ``count`` random float pairs with numpy."""
    from .sampling import pair_arrays

    P_all, Q_all = pair_arrays(seed, d, count)
    hist = np.zeros(4, dtype=np.int64)
    for start in range(0, count, chunk):
        codes = precursor_codes(inequality_id, P_all[start : start + chunk], Q_all[start : start + chunk], tol)
        hist += np.bincount(codes, minlength=4)
    failures = int(hist[batch.SECOND] + hist[batch.INCOMPARABLE])
    return {
        "d": d,
        "count": count,
        "equal": int(hist[batch.EQUAL]),
        "first_majorized": int(hist[batch.FIRST]),
        "second_majorized": int(hist[batch.SECOND]),
        "incomparable": int(hist[batch.INCOMPARABLE]),
        "failures": failures,
    }
