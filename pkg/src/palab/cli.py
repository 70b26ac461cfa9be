"""Command-line interface: ``palab <command> ...``."""

from __future__ import annotations

import argparse
import os
import sys

from . import tower
from .diagram import enumerate_pairings
from .graded import graded_product, graded_trace, named_element, power
from .io import (
    ParseError,
    dumps,
    graded_to_json,
    load_graded,
    load_json,
    pairing_to_json,
    tl_from_json,
    tower_to_json,
)
from .numeric import GramNotPositive
from .spectral import commutant_solver
from .verify import SUITES, SuiteConfig, moment_oracle, report_markdown, run_suite


def parse_range(text: str) -> tuple:
    """``"0..2"`` -> ``(0, 1, 2)``; ``"1,3"`` -> ``(1, 3)``; ``"2"`` -> ``(2,)``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r} (use A..B, A,B,C or A)") from None


def parse_delta(text: str):
    if text == "exact":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"delta must be a number or 'exact', got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("delta must be positive")
    return value


def _emit(obj, path: str | None = None) -> None:
    text = obj if isinstance(obj, str) else dumps(obj) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _scalar(s):
    return s.to_json()


def cmd_basis(args) -> int:
    basis = enumerate_pairings(args.n)
    _emit({"level": args.n, "dim": len(basis), "basis": [pairing_to_json(p) for p in basis]})
    return 0


def _load_tower(path: str, delta):
    x = tl_from_json(load_json(path), delta)
    return x if delta is None else x.eval_at(delta)


def cmd_mul(args) -> int:
    a, b = _load_tower(args.a, args.delta), _load_tower(args.b, args.delta)
    _emit(tower_to_json(tower.mul(a, b)))
    return 0


def cmd_trace(args) -> int:
    x = _load_tower(args.x, args.delta)
    _emit({"trace": _scalar(tower.trace(x))})
    return 0


def cmd_gram(args) -> int:
    if args.delta is None:
        G = tower.gram_matrix(args.n)
        _emit({"level": args.n, "gram": [[_scalar(v) for v in row] for row in G]})
        return 0
    G = tower.gram_matrix(args.n, args.delta)
    out = {"level": args.n, "delta": args.delta, "gram": G.tolist(),
           "min_eigenvalue": tower.positivity(args.n, args.delta)}
    _emit(out)
    return 0


def cmd_product(args) -> int:
    a = load_graded(args.x, args.k, args.r, args.delta)
    b = load_graded(args.y, args.k, args.r, args.delta)
    if args.delta is not None:
        a, b = a.eval_at(args.delta), b.eval_at(args.delta)
    _emit(graded_to_json(graded_product(a, b)))
    return 0


def cmd_moments(args) -> int:
    a = named_element(args.element, args.k, args.r)
    if args.delta is not None:
        a = a.eval_at(args.delta)
    rows, ok = [], True
    acc = power(a, 0)
    if args.delta is not None:
        acc = acc.eval_at(args.delta)
    for m in range(args.m + 1):
        if m:
            acc = graded_product(acc, a)
        row = {"m": m, "trace": _scalar(graded_trace(acc))}
        if args.element == "U":
            oracle = moment_oracle(m, args.delta, args.r)
            row["oracle"] = _scalar(oracle)
            row["agree"] = graded_trace(acc) == oracle
            ok = ok and row["agree"]
        rows.append(row)
    _emit({"element": args.element, "k": args.k, "r": args.r, "moments": rows})
    return 0 if ok else 1


def cmd_commutant(args) -> int:
    gens = [load_graded(g, args.k, args.r) for g in args.gens.split(",") if g]
    res = commutant_solver(gens, args.k, args.N, args.delta, args.r,
                           support=args.support, trace_zero=args.trace_zero)
    out = {
        "k": args.k, "r": args.r, "N": args.N, "delta": args.delta, "support": res.support,
        "unknowns": len(res.columns), "nullity": res.nullity, "residual": res.residual,
        "distance_to_degree_zero": res.degree_zero_distance() if res.nullity else 0.0,
        "basis": [graded_to_json(x) for x in res.elements()],
    }
    _emit(out)
    return 0


def _print_status(rec) -> None:
    print(f"{rec['status']:>7}  {rec['name']}", file=sys.stderr)


def cmd_verify(args) -> int:
    if args.tol is not None:
        os.environ["PALAB_TOL"] = repr(args.tol)
    mode = args.mode or ("numeric" if args.delta is not None else "exact")
    checks = None
    if args.checks:
        checks = tuple(c for c in args.checks.split(",") if c)
    elif args.suite != "all":
        checks = tuple(SUITES[args.suite])
    cfg = SuiteConfig(mode=mode, delta=args.delta, k_range=args.k, r_range=args.r, N=args.N,
                      samples=args.samples, seed=args.seed, checks=checks, timings=args.timings)
    report = run_suite(cfg, _print_status if args.verbose else None)
    text = report_markdown(report) if args.format == "markdown" else dumps(report) + "\n"
    _emit(text, args.report)
    if args.report:
        s = report["summary"]
        print(f"{s['pass']} passed, {s['fail']} failed, {s['skipped']} skipped -> {args.report}")
    return 1 if report["summary"]["fail"] else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="palab", description="Temperley-Lieb diagram calculus and identity checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="list the non-crossing basis of P_n")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("mul", help="multiply two tower elements")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--delta", type=parse_delta, default=None)
    p.set_defaults(func=cmd_mul)

    p = sub.add_parser("trace", help="trace of a tower element")
    p.add_argument("x")
    p.add_argument("--delta", type=parse_delta, default=None)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("gram", help="Gram matrix of P_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=parse_delta, default=None)
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("product", help="graded product of two elements (files or names)")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--delta", type=parse_delta, default=None)
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("moments", help="tr(a^m) for a named element, checked against the path oracle for U")
    p.add_argument("--element", default="U")
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--delta", type=parse_delta, default=None)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("commutant", help="truncated commutant of a set of generators")
    p.add_argument("--gens", required=True, help="comma-separated names or JSON files")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--support", type=int, default=None, help="largest unknown degree (default N-2)")
    p.add_argument("--trace-zero", action="store_true")
    p.set_defaults(func=cmd_commutant)

    p = sub.add_parser("verify", help="run the identity suite")
    p.add_argument("--suite", choices=sorted(SUITES), default="all")
    p.add_argument("--checks", default=None, help="comma-separated check names (overrides --suite)")
    p.add_argument("--mode", choices=["exact", "numeric"], default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--k", type=parse_range, default=(0, 1, 2))
    p.add_argument("--r", type=parse_range, default=(1, 2))
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--format", choices=["json", "markdown"], default="json")
    p.add_argument("--timings", action="store_true", help="include wall time per check")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, GramNotPositive, ValueError, TypeError) as exc:
        print(f"palab {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
