"""Command-line front end: thresholds, construct, verify, instance, oracle."""

import argparse
import re
import sys
from fractions import Fraction

from . import __version__, bits
from .certificate import Certificate, certify, parse_mode, verify_certificate
from .errors import ExpThreshError, ParseError
from .interval import Const, DEFAULT_PREC, precision
from .io import load_family, load_weights, parse_number, read_json, write_json
from .oracles import THRESHOLD_BITS, min_cover_weight_fractional, min_cover_weight_integral, thresholds
from .weights import ENUM_BUDGET, MonotoneFamily, unit_weight_exact, unit_weight_p

EXIT_OK, EXIT_ERROR, EXIT_CHAIN, EXIT_INVALID = 0, 1, 2, 3

ALGORITHMS = ("singleton", "volume", "constant-density", "randomized", "uniformize",
              "weight-class", "linear-star", "nearly-linear")

_CONST_RE = re.compile(r"^\s*(?P<coef>[0-9./]+)?\s*\*?\s*(?P<e>e(\^(?P<pow>-?\d+))?)?\s*$")


def parse_const(text: str) -> Const:
    """'4e', '1024e^2', '10', '3/2' -> Const."""
    m = _CONST_RE.match(text)
    if not m or not (m.group("coef") or m.group("e")):
        raise ParseError(f"bad constant {text!r}; expected like 4e, 1024e^2 or 3/2")
    coef = parse_number(m.group("coef")) if m.group("coef") else Fraction(1)
    e_pow = 0
    if m.group("e"):
        e_pow = int(m.group("pow")) if m.group("pow") else 1
    return Const(coef, e_pow)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _mode(text: str) -> str:
    try:
        parse_mode(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _run_info(args) -> dict:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    return {"tool": "expthresh", "version": __version__, "config": config}


# ---------------------------------------------------------------- subcommands

def cmd_thresholds(args) -> int:
    F = load_family(args.family)
    if F.n > args.budget_enum:
        raise ParseError(f"n = {F.n} exceeds --budget-enum {args.budget_enum}")
    theta = parse_number(args.theta)
    with precision(args.precision):
        report = thresholds(F, theta, args.bisect_bits)
    out = {"family": F.to_json(), **report.to_json(), "run": _run_info(args)}
    write_json(out, args.out)
    return EXIT_OK if report.chain_ok else EXIT_CHAIN


def _default_p(g):
    exact = unit_weight_exact(g)
    return exact if exact is not None else unit_weight_p(g)


def _parse_p(args, g):
    if args.p is None:
        return _default_p(g)
    return parse_const(args.p)


def _support_union(g) -> int:
    V = 0
    for T in g.entries:
        V |= T
    return V


def _construct(args):
    from .constructions import (constant_density_cover, linear_constant_cover, nearly_linear_cover,
                                randomized_cover, singleton_cover, uniformize_cover, volume_cover,
                                weight_class_cover)

    g = load_weights(args.weights)
    p = _parse_p(args, g)
    mode = args.mode
    alg = args.algorithm
    if alg == "singleton":
        return singleton_cover(g, p, mode=mode)[1]
    if alg in ("volume", "constant-density"):
        L = parse_const(args.L or "4e")
        if alg == "volume":
            V = bits.mask(args.V) if args.V else _support_union(g)
            G = volume_cover(V, p, L, g.n)
        else:
            G = constant_density_cover(g, p, L)
        cert = Certificate(g, p, G, L, Fraction(1), mode or ("exhaustive" if g.n <= ENUM_BUDGET else "minimal"),
                           args.seed, provenance={"construction": alg, "t": G.t})
        return certify(cert, budget_enum=args.budget_enum)
    if alg == "randomized":
        return randomized_cover(g, p, args.seed, args.max_retries, mode=mode)[1]
    if alg == "uniformize":
        return uniformize_cover(g, p, mode=mode)[1]
    if alg == "weight-class":
        L = parse_const(args.L) if args.L else None
        return weight_class_cover(g, p, L, mode=mode, seed=args.seed)[1]
    if alg == "linear-star":
        L = parse_const(args.L) if args.L else None
        return linear_constant_cover(g, p, parse_number(args.J), L, mode=mode, seed=args.seed)[1]
    return nearly_linear_cover(g, p, args.c, mode=mode, seed=args.seed)[1]


def cmd_construct(args) -> int:
    with precision(args.precision):
        cert = _construct(args)
        if not args.no_verify:
            cert.report = verify_certificate(cert, args.mode, args.budget_enum)
    out = cert.to_json()
    out["run"] = _run_info(args)
    write_json(out, args.out)
    return EXIT_OK if cert.valid else EXIT_ERROR


def cmd_verify(args) -> int:
    obj = read_json(args.certificate)
    cert = Certificate.from_json(obj)
    with precision(args.precision):
        report = verify_certificate(cert, args.mode, args.budget_enum)
    out = {"valid": report.valid, "report": report.to_json(), "run": _run_info(args)}
    write_json(out, args.out)
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_instance(args) -> int:
    from .instances import InstanceSpec
    params = {}
    for item in args.param or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ParseError(f"--param needs key=value, got {item!r}")
        params[key] = value
    params.setdefault("seed", args.seed)
    inst = InstanceSpec(args.kind, params)
    try:
        obj = inst.build()
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad parameters for {args.kind}: {exc}") from exc
    out = obj.to_json()
    out["instance"] = inst.to_json()
    write_json(out, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    F = load_family(args.family)
    p = parse_number(args.p)
    out = {"family": F.to_json(), "p": str(p), "run": _run_info(args)}
    with precision(args.precision):
        if args.kind in ("integral", "both"):
            out["integral"] = min_cover_weight_integral(F, p).to_json()
        if args.kind in ("fractional", "both"):
            out["fractional"] = min_cover_weight_fractional(F, p).to_json()
    write_json(out, args.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=_positive_int, default=DEFAULT_PREC,
                        help="interval precision in bits (default %(default)s)")
    common.add_argument("--budget-enum", type=_positive_int, default=ENUM_BUDGET,
                        help="largest n for exhaustive 2^n scans (default %(default)s)")
    common.add_argument("--seed", type=_nonneg_int, default=0, help="random seed")
    common.add_argument("--theta", default="1/2", help="smallness level for q and q_f")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--mode", type=_mode, default=None,
                        help="coverage mode: exhaustive | minimal | sampled[:count]")

    parser = argparse.ArgumentParser(prog="expthresh", description="Expectation thresholds and cover certificates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", parents=[common], help="compute q, q_f and p_c of a family")
    p.add_argument("family", help="monotone family JSON ({n, minimal})")
    p.add_argument("--bisect-bits", type=_positive_int, default=THRESHOLD_BITS,
                   help="bisection steps for each threshold (default %(default)s)")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("construct", parents=[common], help="build a cover certificate")
    p.add_argument("weights", help="weight function JSON ({n, entries})")
    p.add_argument("--algorithm", "-a", required=True, choices=ALGORITHMS)
    p.add_argument("--p", default=None, help="probability (default: the unit-weight point)")
    p.add_argument("--L", default=None, help="loss constant, e.g. 4e or 1024e^2")
    p.add_argument("--J", default="1", help="J for linear-star")
    p.add_argument("--c", type=_positive_int, default=1, help="codegree parameter for nearly-linear")
    p.add_argument("--V", type=int, nargs="+", default=None, help="vertex set for volume")
    p.add_argument("--max-retries", type=_positive_int, default=100)
    p.add_argument("--no-verify", action="store_true", help="skip the final independent verification")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="re-check a certificate")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("instance", parents=[common], help="generate an instance")
    p.add_argument("kind", choices=("k_ap", "random_linear", "halving", "random_monotone",
                                    "random_weights", "fano", "steiner", "clique"))
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_instance)

    p = sub.add_parser("oracle", parents=[common], help="optimal integral/fractional cover at p")
    p.add_argument("family")
    p.add_argument("--p", required=True)
    p.add_argument("--kind", choices=("integral", "fractional", "both"), default="both")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ExpThreshError as exc:
        write_json(exc.to_json())
        return EXIT_ERROR
    except (ValueError, KeyError) as exc:
        write_json({"error": "ParseError", "message": str(exc)})
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
