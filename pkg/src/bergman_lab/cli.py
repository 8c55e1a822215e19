"""
Command line entry point ``blab``.

Subcommands::

    blab validate CFG
    blab run CFG [--out DIR] [--seed K] [--threads T] [--cache PATH]
    blab kernel build CFG --cache PATH
    blab geometry SUBOP ARGS...
    blab report A.csv B.csv ... [--out MERGED.csv]

Exit codes: 0 success, 2 invalid input, 3 Gram conditioning guard,
4 invariant violation.
"""

import argparse
import json
import logging
import sys

import numpy as np

from . import cache
from . import config as cf
from . import geometry as geo
from . import report as rp
from . import weights as wt
from .errors import CacheMismatchError, GramConditioningError, InvariantViolation, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_GUARD, EXIT_INVARIANT = 0, 2, 3, 4


def parse_point(text):
    """``"0.5,0.3j"`` -> complex array; each entry is parsed by :func:`complex`."""
    try:
        return np.array([complex(c.strip().replace(" ", "")) for c in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse point {text!r}") from None


def _jsonable_point(z):
    return [[float(c.real), float(c.imag)] for c in np.atleast_1d(z)]


def _geometry(args):
    op = args.subop
    if op == "involution":
        out = {"phi": _jsonable_point(geo.involution(args.w, args.z))}
    elif op == "pseudo-hyperbolic":
        out = {"gamma": float(geo.pseudo_hyperbolic(args.z, args.w))}
    elif op == "bergman-metric":
        out = {"beta": float(geo.bergman_metric(args.z, args.w))}
    elif op == "in-ball":
        out = {"inside": bool(geo.in_bergman_ball(args.z, args.r, args.w))}
    elif op == "volume":
        out = {"volume": float(geo.bergman_ball_volume(args.z, args.r))}
    elif op == "ellipsoid":
        e = geo.ellipsoid_params(args.z, args.r)
        out = {"center": _jsonable_point(e.center), "t_param": e.t_param,
               "radius_tangential": e.radius_tangential, "radius_normal": e.radius_normal}
    elif op == "inclusion":
        c = geo.inclusion_constants(args.r, args.n, args.a_r, args.divisor)
        out = {"r1": c.r1, "big_c": c.big_c, "alpha": c.alpha, "a_r_estimate": c.a_r_estimate,
               "divisor": c.divisor}
    elif op == "green":
        out = {"g": float(wt.green_g(args.z))}
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown geometry operation {op!r}")
    print(json.dumps(out))
    return EXIT_OK


def _validate(args):
    diags = cf.validate_config(args.config)
    for d in diags:
        print(d)
    if not diags:
        print(f"{args.config}: ok")
    return EXIT_VALIDATION if diags else EXIT_OK


def _run(args):
    cfg = cf.load_config(args.config)
    report = rp.run_experiment(cfg, out_dir=args.out, seed=args.seed, threads=args.threads,
                               cache_path=args.cache)
    for s in report.series:
        print(f"{s.name}: sup={s.sup:.6g} inf={s.inf:.6g} verdict={s.verdict}")
    print(f"wrote {report.csv_path} and {report.json_path}")
    return EXIT_OK


def _kernel_build(args):
    cfg = cf.load_config(args.config)
    model = cache.load_or_build(args.cache, cfg.weight, cfg.degree_cap, cfg.rule)
    print(f"model n={model.n} N={model.degree_cap} basis={len(model.basis)} "
          f"condition={model.condition_estimate:.3e} cache={args.cache}")
    return EXIT_OK


def _report(args):
    text = rp.merge_csv(args.reports)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="blab", description="Weighted Bergman space laboratory")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="list every problem in a config without running it")
    p.add_argument("config")
    p.set_defaults(func=_validate)

    p = sub.add_parser("run", help="run the sweeps of a config and write CSV/JSON reports")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="output directory (default: config output_dir)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--threads", type=int, default=1, help="sweeps run concurrently")
    p.add_argument("--cache", default=None, help="model cache file to reuse or create")
    p.set_defaults(func=_run)

    p = sub.add_parser("kernel", help="model operations")
    ksub = p.add_subparsers(dest="kernel_command", required=True)
    kb = ksub.add_parser("build", help="build the config's model and store it")
    kb.add_argument("config")
    kb.add_argument("--cache", required=True)
    kb.set_defaults(func=_kernel_build)

    p = sub.add_parser("geometry", help="single geometry evaluations")
    gsub = p.add_subparsers(dest="subop", required=True)
    for name, fields in [("involution", "wz"), ("pseudo-hyperbolic", "zw"),
                         ("bergman-metric", "zw"), ("in-ball", "zrw"), ("volume", "zr"),
                         ("ellipsoid", "zr"), ("green", "z")]:
        g = gsub.add_parser(name)
        for f in fields:
            g.add_argument(f, type=float if f == "r" else parse_point)
        g.set_defaults(func=_geometry)
    g = gsub.add_parser("inclusion")
    g.add_argument("r", type=float)
    g.add_argument("n", type=int)
    g.add_argument("--a-r", dest="a_r", type=float, default=1.0)
    g.add_argument("--divisor", type=float, default=4.0)
    g.set_defaults(func=_geometry)

    p = sub.add_parser("report", help="merge report CSVs into one table")
    p.add_argument("reports", nargs="+")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, CacheMismatchError) as exc:
        print(f"blab: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GramConditioningError as exc:
        print(f"blab: numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except InvariantViolation as exc:
        print(f"blab: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, ArithmeticError) as exc:
        print(f"blab: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
