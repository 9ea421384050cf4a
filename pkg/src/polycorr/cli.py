"""Command-line interface: ``polycorr <subcommand> [options]``.

Exit codes: 0 success, 1 output could not be written, 2 unparsable input,
3 invalid input (bad grid, shapes, degree cap), 4 the closed-form exponential
recursion is not usable and ``--fallback-expm`` was not given.
"""

import argparse
import json
import sys

import numpy as np

from .bench import rows_to_csv, run_bench
from .correlator import CorrelatorSpec, correlator
from .errors import DomainError, ExpmConditionError, ShapeError
from .generator import PolyModel, generator_expm, generator_matrix
from .greeks import greeks
from .mc import OUParams, mc_correlator
from .pricing import DEFAULT_DEGREE_CAP, AsianSpec, asian_price_poly

EXIT_OK, EXIT_IO, EXIT_PARSE, EXIT_DOMAIN, EXIT_EXPM = 0, 1, 2, 3, 4


class ParseError(Exception):
    pass


def fmt(x):
    return f"{x:.12e}"


def _load(path, build):
    try:
        with open(path) as fh:
            data = json.load(fh)
        return build(data)
    except (DomainError, ShapeError):
        raise
    except (OSError, ValueError, KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc


def _load_model(path):
    return _load(path, lambda d: PolyModel.from_dict(d.get("model", d)))


def _expm(args):
    return "auto" if args.fallback_expm else "checked"


def _write(path, text):
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def cmd_correlator(args):
    spec = _load(args.config, CorrelatorSpec.from_dict)
    value = correlator(spec, sparse=args.sparse, expm=_expm(args))
    print(fmt(value))
    if args.out:
        _write(args.out, json.dumps({"value": value, "spec": spec.to_dict()}, indent=2) + "\n")


def cmd_greeks(args):
    spec = _load(args.config, CorrelatorSpec.from_dict)
    report = greeks(spec, expm=_expm(args), sparse=args.sparse)
    text = "\n".join(report.as_lines())
    print(text)
    if args.out:
        _write(args.out, text + "\n")


def cmd_price_asian(args):
    spec = _load(args.config, AsianSpec.from_dict)
    value = asian_price_poly(spec, degree_cap=args.degree_cap, expm=_expm(args))
    print(fmt(value))
    if args.out:
        _write(args.out, json.dumps({"price": value}) + "\n")


def _monomial_powers(spec):
    powers = []
    for k in range(spec.m, -1, -1):
        nz = np.flatnonzero(spec.polys[k])
        if nz.size != 1 or spec.polys[k][nz[0]] != 1.0:
            raise DomainError("mc-compare needs each polynomial to be a monomial x**k")
        powers.append(int(nz[0]))
    return powers


def cmd_mc_compare(args):
    spec = _load(args.config, CorrelatorSpec.from_dict)
    p = OUParams.from_model(spec.model, spec.y)
    powers = _monomial_powers(spec)
    value = correlator(spec, sparse=args.sparse, expm=_expm(args))
    res = mc_correlator(p, powers, spec.grid, args.N, args.reps, value, args.tol, args.seed)
    lines = [f"formula={fmt(value)}", f"mc_estimate={fmt(res.estimate)}",
             f"mc_stderr={fmt(res.stderr)}", f"mc_worst={fmt(res.worst_value)}",
             f"mc_worst_rel_err={fmt(res.worst_rel_err)}",
             f"mc_fails={res.failures}/{args.reps}"]
    print("\n".join(lines))
    if args.out:
        _write(args.out, "\n".join(lines) + "\n")


def cmd_bench(args):
    rows = run_bench(args.m, args.n, N=args.N, reps=args.reps, runs=args.runs,
                     tol=args.tol, seed=args.seed, expm=_expm(args))
    text = rows_to_csv(rows)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)


def _print_matrix(M):
    for row in M:
        print(" ".join(fmt(v) for v in row))


def cmd_gen_matrix(args):
    model = _load_model(args.config)
    _print_matrix(generator_matrix(model, args.degree))


def cmd_expm(args):
    model = _load_model(args.config)
    _print_matrix(generator_expm(model, args.degree, args.t, _expm(args)))


def build_parser():
    parser = argparse.ArgumentParser(prog="polycorr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, config=True):
        p = sub.add_parser(name, help=help_)
        if config:
            p.add_argument("--config", required=True, help="JSON input file")
        p.add_argument("--out", help="also write the result to this file")
        p.add_argument("--fallback-expm", action="store_true",
                       help="use dense Pade exponentials when the recursion is unusable")
        p.set_defaults(func=func)
        return p

    def representation(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--sparse", dest="sparse", action="store_true",
                       help="apply eliminating/duplicating matrices as index gathers")
        g.add_argument("--dense", dest="sparse", action="store_false",
                       help="use dense eliminating/duplicating matrices (default)")
        p.set_defaults(sparse=False)

    def monte_carlo(p, N, reps):
        p.add_argument("--N", type=int, default=N, help="paths per repetition")
        p.add_argument("--reps", type=int, default=reps, help="repetitions")
        p.add_argument("--tol", type=float, default=1e-3, help="relative failure tolerance")
        p.add_argument("--seed", type=int, default=0, help="root seed")

    representation(add("correlator", cmd_correlator, "evaluate a correlator"))
    representation(add("greeks", cmd_greeks, "delta and thetas of a correlator"))
    p = add("price-asian", cmd_price_asian, "Asian option with polynomial payoff")
    p.add_argument("--degree-cap", type=int, default=DEFAULT_DEGREE_CAP)
    p = add("mc-compare", cmd_mc_compare, "Monte Carlo check of an OU correlator")
    representation(p)
    monte_carlo(p, 10_000, 100)
    p = add("bench", cmd_bench, "timing table as CSV", config=False)
    p.add_argument("--m", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--runs", type=int, default=5, help="timed runs per cell (median)")
    monte_carlo(p, 10_000, 100)
    for name, func, help_ in (("gen-matrix", cmd_gen_matrix, "print the generator matrix"),
                              ("expm", cmd_expm, "print exp(G_n t)")):
        p = add(name, func, help_)
        p.add_argument("--degree", type=int, required=True, help="polynomial degree n")
        if name == "expm":
            p.add_argument("--t", type=float, required=True, help="time step")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ExpmConditionError as exc:
        print(f"error: {exc}; rerun with --fallback-expm", file=sys.stderr)
        return EXIT_EXPM
    except (DomainError, ShapeError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
