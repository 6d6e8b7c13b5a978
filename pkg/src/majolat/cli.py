"""Command-line front end.

    majolat compute meet --p "[0.5,0.5,0]" --q "[0.6,0.2,0.2]"
    majolat verify --id Thm1 --d 5 --count 1000 --seed 7
    majolat search --alpha 0.3,0.5 --d 3,4 --budget 100000 --seed 1
    majolat report --input Thm1_d5_seed7.csv --output summary.json

Exit codes: 0 success, 1 a universal inequality failed, 2 usage error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import core, functionals, lattice, sampling, verify
from .errors import MajorizationError

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

SEED_ENV = "MAJOLAT_SEED"


class UsageError(Exception):
    pass


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        raise UsageError(f"--seed is required (or set {SEED_ENV})")
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="majolat", description="Majorization lattice toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate one lattice object or functional")
    c.add_argument("what", choices=["meet", "join", "directsum", "tensor", "entropy", "divergence"])
    c.add_argument("--p", help="JSON array")
    c.add_argument("--q", help="JSON array")
    c.add_argument("--file", help="JSONL input, one distribution per line (binary ops pair consecutive lines)")
    c.add_argument("--backend", choices=["float", "rational"], default="float")
    c.add_argument("--kind", default=None, help="entropy: shannon|renyi|tsallis; divergence: kl|w_phi")
    c.add_argument("--alpha", type=float, default=None)

    v = sub.add_parser("verify", help="check an inequality on random pairs")
    v.add_argument("--id", required=True, dest="inequality_id")
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--count", type=int, required=True)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--alpha", default=None, help="comma-separated α grid")
    v.add_argument("--functional", default="shannon", help="for Cor1/Cor2: shannon|tsallis|alpha_norm_pow")
    v.add_argument("--backend", choices=["float", "rational"], default="float")
    v.add_argument("--threads", type=int, default=1)
    v.add_argument("--out-dir", default=".")
    v.add_argument("--csv", default=None, help="CSV path (default: <out-dir>/<id>_d<d>_seed<seed>.csv)")
    v.add_argument("--summary", default=None, help="summary JSON path (default: next to the CSV)")

    s = sub.add_parser("search", help="look for counterexamples to a lattice inequality")
    s.add_argument("--functional", default="renyi")
    s.add_argument("--relation", default="supermodular", choices=list(sampling.RELATIONS))
    s.add_argument("--alpha", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    s.add_argument("--d", default="3,4,5,6")
    s.add_argument("--budget", type=int, default=1_000_000, help="pairs drawn per (alpha, d, direction)")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--direction", choices=["negative", "positive", "both"], default="both")
    s.add_argument("--threshold", type=float, default=1e-6)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out", default="witnesses.jsonl")

    r = sub.add_parser("report", help="summarize a verify CSV into JSON")
    r.add_argument("--input", required=True)
    r.add_argument("--output", required=True)
    return parser


# -- compute -------------------------------------------------------------------------


def _compute_one(args, dists):
    if args.what == "meet":
        return lattice.meet(*dists)
    if args.what == "join":
        return lattice.join(*dists)
    if args.what == "directsum":
        return core.direct_sum(*dists)
    if args.what == "tensor":
        return core.tensor(*dists)
    if args.what == "entropy":
        kind = args.kind or "shannon"
        if kind == "shannon":
            return functionals.shannon(dists[0])
        if args.alpha is None:
            raise UsageError(f"{kind} entropy needs --alpha")
        if kind == "renyi":
            return functionals.renyi(dists[0], args.alpha)
        if kind == "tsallis":
            return functionals.tsallis(dists[0], args.alpha)
        raise UsageError(f"unknown entropy kind {kind!r}")
    kind = args.kind or "kl"
    if kind == "kl":
        return functionals.kl(*dists)
    if kind == "w_phi":
        if args.alpha is None:
            raise UsageError("w_phi needs --alpha")
        return functionals.w_phi(dists[0], dists[1], args.alpha)
    raise UsageError(f"unknown divergence kind {kind!r}")


def cmd_compute(args, out) -> int:
    backend = core.get_backend(args.backend)
    if backend.exact and args.what in ("entropy", "divergence"):
        raise UsageError("entropies and divergences are float-only; drop --backend rational")
    arity = 1 if args.what == "entropy" else 2
    if args.file:
        dists = core.read_jsonl(args.file, backend)
        if len(dists) % arity:
            raise UsageError(f"{args.what} pairs consecutive lines; got an odd line count")
        groups = [dists[i : i + arity] for i in range(0, len(dists), arity)]
    else:
        texts = [args.p] if arity == 1 else [args.p, args.q]
        if any(t is None for t in texts):
            raise UsageError("missing --p/--q (or --file)")
        groups = [[core.parse_distribution(t, backend) for t in texts]]
    for group in groups:
        out.write(core.dumps(_compute_one(args, group)) + "\n")
    return EXIT_OK


# -- verify ---------------------------------------------------------------------------


def cmd_verify(args, out) -> int:
    seed = _seed(args)
    iid = verify.InequalityId.parse(args.inequality_id)
    backend = core.get_backend(args.backend)
    if backend.exact and iid not in verify.PRECURSORS:
        raise UsageError(f"--backend rational only applies to Thm1/Thm2/Lem2, not {iid.value}")
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    alphas = _floats(args.alpha) if args.alpha else None
    res = verify.batch_verify(iid, args.d, args.count, seed, alphas, args.threads, backend, args.functional)
    summary = verify.attach_argmin_pair(res.summary, seed, backend)
    summary["backend"] = backend.mode
    summary["threads"] = args.threads

    csv_path = Path(args.csv) if args.csv else Path(args.out_dir) / f"{iid.value}_d{args.d}_seed{seed}.csv"
    summary_path = Path(args.summary) if args.summary else csv_path.with_suffix(".summary.json")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with open(csv_path, "w", newline="") as fh:
        verify.write_csv(res.reports, fh)
    with open(summary_path, "w") as fh:
        verify.dump_json(summary, fh)
    out.write(json.dumps({
        "inequality_id": iid.value,
        "pass_rate": summary["pass_rate"],
        "min_gap": summary["min_gap"],
        "all_universal_passed": summary["all_universal_passed"],
        "csv": str(csv_path),
        "summary": str(summary_path),
    }) + "\n")
    return EXIT_OK if summary["all_universal_passed"] else EXIT_FAILED


# -- search ---------------------------------------------------------------------------


def cmd_search(args, out) -> int:
    seed = _seed(args)
    alphas, dims = _floats(args.alpha), _ints(args.d)
    directions = ["negative", "positive"] if args.direction == "both" else [args.direction]
    records = []
    for alpha in alphas:
        for d in dims:
            cfg = sampling.SampleConfig(d, seed=seed, max_tries=args.budget)
            for direction in directions:
                res = sampling.search_counterexample(
                    args.functional, args.relation, alpha, cfg, direction, args.threshold, args.threads
                )
                line = {
                    "alpha": alpha, "d": d, "direction": direction, "found": res.found,
                    "tries": res.tries, "witness_index": res.witness_index,
                    "witness_gap": res.witness_gap, "extreme_gap": res.extreme_gap,
                }
                if res.found:
                    records.append(sampling.pin_witness(res))
                out.write(json.dumps(line) + "\n")
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return EXIT_OK


# -- report ---------------------------------------------------------------------------


def cmd_report(args, out) -> int:
    with open(args.input, newline="") as fh:
        rows = verify.read_csv(fh)
    summary = verify.summarize_rows(rows)
    with open(args.output, "w") as fh:
        verify.dump_json(summary, fh)
    out.write(json.dumps({"total": summary["total"], "passed": summary["passed"]}) + "\n")
    return EXIT_OK


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "search": cmd_search, "report": cmd_report}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, MajorizationError, json.JSONDecodeError) as exc:
        print(f"majolat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"majolat: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
