"""Command-line front end.

Exit status: 0 on success, 1 on usage errors (including malformed tau),
2 when an internal invariant check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from seqroute import __version__
from seqroute import analytics, continuous, experiments
from seqroute.graph import GraphInvariantError, build_by_criterion, build_incremental, load_graph
from seqroute.permutation import PermutationError, parse_tau, random_permutation, record_stats
from seqroute.rng import DEFAULT_SEED, stream
from seqroute.routing import RoutingInvariantError, greedy_walk, steps_via_records
from seqroute.verify import verify

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2

INVARIANT_ERRORS = (
    experiments.IdentityViolation,
    GraphInvariantError,
    RoutingInvariantError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common(p: argparse.ArgumentParser, fmt: str) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=("csv", "json"), default=fmt)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seqroute", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"seqroute {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("construct", help="build G_n and export it as JSON")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--tau", help="insertion times listed by vertex, e.g. 3,1,2")
    src.add_argument("--n", type=int, help="draw a uniform insertion order of this size")
    p.add_argument("--builder", choices=("incremental", "criterion"), default="incremental")
    _common(p, "json")

    p = sub.add_parser("records", help="LTR/RTL minima of tau")
    p.add_argument("--tau", required=True)
    p.add_argument("--window", type=_int_list, help="lo,hi (inclusive)")
    _common(p, "json")

    p = sub.add_parser("route", help="greedy walk between two vertices")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--tau")
    src.add_argument("--graph", type=Path, help="JSON written by `construct --out`")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    _common(p, "json")

    p = sub.add_parser("bounds", help="finite-n or asymptotic tail bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--direction", choices=("upper", "lower"), default="upper")
    p.add_argument("--asymptotic", action="store_true")
    _common(p, "json")

    for name, help_ in (
        ("pmf", "empirical pmf of S_n with normal approximation"),
        ("tails", "empirical tails vs Bennett bounds"),
        ("bound-ratio", "bound / empirical upper-tail ratio"),
        ("random-pairs", "mean steps for uniform random endpoints"),
        ("covariance", "sample Cov(L_n, R_n)"),
        ("clt", "standardized moments and KS distance"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--n", type=_int_list, required=True)
        p.add_argument("--trials", type=int, default=100_000)
        if name in ("tails", "bound-ratio"):
            p.add_argument("--c", type=_float_list, default=[0.2, 0.5, 1.0])
        p.add_argument("--cross-check-every", type=int, default=experiments.CROSS_CHECK_EVERY)
        _common(p, "csv")

    p = sub.add_parser("continuous", help="K-NN growth on the circle/interval")
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--k", type=_int_list, required=True)
    p.add_argument("--topology", choices=("circle", "interval"), default="circle")
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--instances", type=int, default=1)
    _common(p, "csv")

    p = sub.add_parser("verify", help="exhaustive or sampled self-test")
    p.add_argument("--n", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--sampled", action="store_true")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--endpoints-only", action="store_true",
                   help="skip the arbitrary-pair walk checks")
    _common(p, "json")
    return parser


def _meta(args) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("out", "format", "workers")}
    return {"version": __version__, "config": config}


def _emit(args, text: str) -> None:
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload: dict) -> None:
    payload = {"meta": _meta(args), **payload}
    _emit(args, json.dumps(payload, indent=2, default=str) + "\n")


def _emit_rows(args, columns, rows, header: list[str]) -> None:
    if args.format == "json":
        _emit_json(args, {"columns": list(columns), "rows": rows})
        return
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in columns])
    _emit(args, buf.getvalue())


def _perm_from_tau(text: str):
    try:
        return parse_tau(text)
    except PermutationError as exc:
        raise UsageError(f"malformed --tau: {exc}") from None


def cmd_construct(args) -> int:
    if args.tau is not None:
        perm = _perm_from_tau(args.tau)
    else:
        if args.n < 1:
            raise UsageError("--n must be >= 1")
        perm = random_permutation(args.n, stream(args.seed, args.n))
    build = build_incremental if args.builder == "incremental" else build_by_criterion
    g = build(perm)
    _emit_json(args, g.to_json())
    return EXIT_OK


def cmd_records(args) -> int:
    perm = _perm_from_tau(args.tau)
    window = (1, perm.n)
    if args.window:
        if len(args.window) != 2:
            raise UsageError("--window takes lo,hi")
        window = tuple(args.window)
    try:
        rs = record_stats(perm, window)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit_json(args, {
        "window": list(rs.window), "ltr": list(rs.ltr_positions), "rtl": list(rs.rtl_positions),
        "L": rs.L, "R": rs.R, "m": rs.m,
    })
    return EXIT_OK


def cmd_route(args) -> int:
    if args.graph is not None:
        try:
            g = load_graph(args.graph)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot load graph: {exc}") from None
    else:
        g = build_incremental(_perm_from_tau(args.tau))
    if not (1 <= args.s <= g.n and 1 <= args.t <= g.n) or args.s == args.t:
        raise UsageError(f"need distinct --s/--t in 1..{g.n}")
    trace = greedy_walk(g, args.s, args.t)
    rs = record_stats(g.source_perm, (min(args.s, args.t), max(args.s, args.t)))
    _emit_json(args, {
        "path": list(trace.path), "steps": trace.steps, "L": rs.L, "R": rs.R,
        "identity_check": trace.steps == steps_via_records(g.source_perm, args.s, args.t),
    })
    return EXIT_OK


def cmd_bounds(args) -> int:
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    if args.asymptotic:
        if args.c is None:
            raise UsageError("--asymptotic needs --c")
        try:
            exponent = analytics.asymptotic_exponent(args.c, args.direction)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        center = 2 + args.c if args.direction == "upper" else 2 - args.c
        _emit_json(args, {
            "label": "asymptotic reference curve",
            "n": args.n, "c": args.c, "direction": args.direction,
            "threshold": center * math.log(args.n),
            "rate_argument": args.c / 2 if args.direction == "upper" else -args.c / 2,
            "rate_value": exponent, "bound": args.n ** (-exponent),
        })
        return EXIT_OK
    if args.t is None:
        raise UsageError("bounds needs --t (or --c with --asymptotic)")
    tb = analytics.finite_tail_bound(args.n, args.t, args.direction)
    payload = dict(vars(tb))
    if math.isinf(payload["rate_value"]):
        payload["rate_value"] = "inf"
    _emit_json(args, payload)
    return EXIT_OK


_KIND = {
    "pmf": "pmf", "tails": "tails", "bound-ratio": "bound_ratio",
    "random-pairs": "random_pairs", "covariance": "covariance", "clt": "clt",
}


def cmd_experiment(args) -> int:
    try:
        config = experiments.ExperimentConfig(
            kind=_KIND[args.command], n_list=args.n, trials=args.trials, seed=args.seed,
            workers=args.workers, c_list=getattr(args, "c", []),
            cross_check_every=args.cross_check_every,
        )
        result = experiments.run_experiment(config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(args, result.to_json() + "\n" if args.format == "json" else result.to_csv())
    return EXIT_OK


def cmd_continuous(args) -> int:
    try:
        rows = continuous.conjecture_sweep(
            args.n, args.k, args.pairs, args.instances, seed=args.seed,
            topology=args.topology, workers=args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    header = [f"seqroute {__version__}", "config " + json.dumps(_meta(args)["config"], sort_keys=True)]
    _emit_rows(args, continuous.SWEEP_COLUMNS, rows, header)
    return EXIT_OK


def cmd_verify(args) -> int:
    mode = "sampled" if args.sampled else "exhaustive"
    try:
        report = verify(args.n, mode, args.trials, args.seed, args.endpoints_only)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit_json(args, report.to_json())
    return EXIT_OK if report.passed else EXIT_INVARIANT


COMMANDS = {
    "construct": cmd_construct,
    "records": cmd_records,
    "route": cmd_route,
    "bounds": cmd_bounds,
    "continuous": cmd_continuous,
    "verify": cmd_verify,
    **{name: cmd_experiment for name in _KIND},
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except INVARIANT_ERRORS as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
