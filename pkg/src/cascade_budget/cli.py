"""Command-line interface: ``cascade-budget {prob,simulate,optimize,sweep,census}``.

Single results are printed as flat JSON; sweeps and the census are CSV.
Exit codes: 0 success, 2 invalid input, 3 output not writable.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys

from .analytic import Mode, pcc, pcc_rational_approximation, rational_census
from .core import Status, TruthState, validate_qualities
from .errors import CascadeError
from .optimize import BudgetProblem, optimize, verify
from .simulate import estimate, estimate_pcc

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3

SWEEP_HEADER = "p2,a,mode,pcc,ycas_G,ncas_B"
CENSUS_HEADER = "r,q,p2,gap_G,gap_B,gap_pcc"


class _IOFailure(Exception):
    pass


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x)) if isinstance(x, float) else str(x)


def _emit_json(doc: dict) -> None:
    print(json.dumps(doc))


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}") from exc
    with fh:
        yield fh


def cmd_prob(args) -> int:
    q = validate_qualities(args.p1, args.p2)
    res = pcc(q, Mode(args.mode), args.tol)
    doc = {"p1": q.p1, "p2": q.p2, "requested_mode": args.mode, "tol": args.tol}
    doc.update(res.as_dict())
    _emit_json(doc)
    return EXIT_OK


def cmd_simulate(args) -> int:
    q = validate_qualities(args.p1, args.p2)
    if args.paths < 1:
        raise CascadeError("--paths must be at least 1")
    doc = {"p1": q.p1, "p2": q.p2}
    if args.pcc:
        est = estimate_pcc(q, args.paths, args.seed, workers=args.workers)
        doc.update({"quantity": "pcc"})
    else:
        truth = TruthState(args.truth)
        target = args.target or ("Y" if truth is TruthState.G else "N")
        status = Status.Y_CASCADE if target == "Y" else Status.N_CASCADE
        est = estimate(q, truth, status, args.paths, args.seed, workers=args.workers)
        doc.update({"quantity": "cascade", "truth": truth.value, "target": target})
    doc.update(est.as_dict())
    _emit_json(doc)
    return EXIT_OK


def cmd_optimize(args) -> int:
    q = validate_qualities(args.p1, args.p2)
    swapped = not q.canonical
    canon = q.swapped() if swapped else q
    prob = BudgetProblem(canon.p1, canon.p2, args.budget)
    decision = optimize(prob)
    if args.verify:
        verify(decision, args.grid_step)

    def labeled(prefix, alloc):
        # report improvements against the caller's own p1/p2 labels
        c1, c2, n1, n2 = alloc.c1, alloc.c2, alloc.p1, alloc.p2
        if swapped:
            c1, c2, n1, n2 = c2, c1, n2, n1
        return {
            f"{prefix}c1": c1,
            f"{prefix}c2": c2,
            f"{prefix}p1_new": n1,
            f"{prefix}p2_new": n2,
            f"{prefix}pcc": alloc.pcc,
        }

    best = decision.best
    doc = {
        "p1": q.p1,
        "p2": q.p2,
        "budget": prob.b,
        "swapped": swapped,
        "theorem_regime": prob.theorem_regime,
        "equalize_feasible": prob.equalize_feasible,
        "chosen": decision.chosen,
        "capped": best.capped,
    }
    doc.update(labeled("", best))
    for cand in decision.candidates:
        doc.update(labeled(f"{cand.name}_", cand))
    doc["candidates"] = ",".join(c.name for c in decision.candidates)
    if args.verify:
        doc["grid_step"] = decision.grid_step
        doc.update(labeled("grid_", decision.grid_best))
        doc["verified_by_grid"] = decision.verified_by_grid
    _emit_json(doc)
    return EXIT_OK


def sweep_rows(p1: float, p2_from: float, p2_to: float, step: float, modes, max_den=1000):
    """Yield CSV rows (as tuples) for the p2 sweep at fixed p1."""
    if not step > 0 or not p2_from < p2_to:
        raise CascadeError("need step > 0 and p2_from < p2_to")
    count = int(math.floor((p2_to - p2_from) / step + 1e-9)) + 1
    for k in range(count):
        p2 = round(p2_from + k * step, 12)
        q = validate_qualities(p1, p2)
        for mode in modes:
            if mode == "rational":
                res = pcc_rational_approximation(q, max_den)
            else:
                res = pcc(q, Mode(mode))
            yield p2, res.a, mode, res.pcc, res.ycas_g, res.ncas_b


def cmd_sweep(args) -> int:
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    for m in modes:
        Mode(m)
    validate_qualities(args.p1, args.p1)
    rows = list(sweep_rows(args.p1, args.p2_from, args.p2_to, args.step, modes, args.max_den))
    with _open_out(args.out) as fh:
        fh.write(SWEEP_HEADER + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    return EXIT_OK


def cmd_census(args) -> int:
    if not args.eps > 0 or math.isinf(args.eps):
        raise CascadeError("--eps must be a positive number")
    if args.max_den < 1:
        raise CascadeError("--max-den must be at least 1")
    report = rational_census(args.p1, args.eps, args.max_den)
    with _open_out(args.out) as fh:
        fh.write(CENSUS_HEADER + "\n")
        for e in report.entries:
            fh.write(",".join(_fmt(x) for x in e) + "\n")
        fh.write(
            f"# exceed_count={report.exceed_count} exceed_count_G={report.exceed_count_g}"
            f" exceed_count_B={report.exceed_count_b}"
            f" theoretical_bound={report.theoretical_bound!r}"
            f" epsilon={report.epsilon!r} max_den={report.max_den}"
            f" skipped={len(report.skipped)}\n"
        )
    return EXIT_OK


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cascade-budget", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob", help="cascade probabilities for one quality pair")
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="auto")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("simulate", help="Monte-Carlo estimate")
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--paths", type=int, default=1_000_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--workers", type=int, default=1)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--truth", choices=["G", "B"])
    which.add_argument("--pcc", action="store_true", help="correct-cascade probability")
    p.add_argument("--target", choices=["Y", "N"], help="cascade counted (default: the correct one)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="allocate a quality-improvement budget")
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--budget", type=float, required=True)
    p.add_argument("--verify", action="store_true", help="check against an exhaustive grid")
    p.add_argument("--grid-step", type=float, default=0.0025)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="correct-cascade probability along p2 (CSV)")
    p.add_argument("--p1", type=float, default=0.7)
    p.add_argument("--p2-from", type=float, default=0.501)
    p.add_argument("--p2-to", type=float, default=0.999)
    p.add_argument("--step", type=float, default=0.001)
    p.add_argument("--modes", default="irrational,rational")
    p.add_argument("--max-den", type=int, default=1000,
                   help="denominator bound for the rational-formula curve")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("census", help="rational vs irrational formula gaps (CSV)")
    p.add_argument("--p1", type=float, default=0.7)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--max-den", type=int, default=32)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_census)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CascadeError, ValueError) as exc:
        print(f"cascade-budget: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _IOFailure as exc:
        print(f"cascade-budget: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
