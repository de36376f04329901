"""Command-line interface: gen, learn, eval, bound, cover, complexity, sweep.

Exit status is 0 on success, 1 on domain errors (a stage failed, the data is
unusable) and 2 on usage errors (bad flags, bad config values, empty grids).
"""
from __future__ import annotations

import argparse
import csv
import sys
import warnings

from . import __version__
from .bounding import NoiseModel, bounding_ball
from .errors import ParameterError, SimplexLearnError
from .geometry import IsoperimetryParams, standard_simplex
from .io import dumps, load_ball, load_config, load_dataset, load_simplex, save_dataset
from .metrics import complexity_report, tv_uniform
from .pipeline import SWEEP_COLUMNS, THREADS_ENV, ExperimentConfig, default_threads, learn, sweep
from .quantize import COVERING_CAP, grid_covering, random_covering, verify_cover
from .rng import RngStream
from .sampling import generate_dataset


def _emit(obj, out):
    text = dumps(obj)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads(args) -> int:
    t = args.threads if args.threads is not None else default_threads()
    if t < 1:
        raise ParameterError("--threads must be >= 1")
    return t


def _parse_sets(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ParameterError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def cmd_gen(args):
    truth = load_simplex(args.truth) if args.truth else standard_simplex(args.dim)
    if truth.dim != args.dim:
        raise ParameterError(f"--dim {args.dim} does not match the truth file (K={truth.dim})")
    if (args.sigma is None) == (args.snr is None):
        raise ParameterError("give exactly one of --sigma and --snr")
    sigma = args.sigma if args.sigma is not None else truth.volume ** (1 / truth.dim) / args.snr
    data = generate_dataset(truth, args.n, sigma, args.seed)
    save_dataset(args.out, data)
    return 0


def cmd_learn(args):
    mapping = load_config(args.config) if args.config else {}
    mapping.update(_parse_sets(args.set))
    if args.seed is not None:
        mapping["seed"] = args.seed
    if args.truth is not None:
        mapping["truth"] = args.truth
    config = ExperimentConfig.from_mapping(mapping)
    _threads(args)  # kernels are serial; the cap only matters for sweeps
    truth = load_simplex(config.truth) if config.truth else None
    data = load_dataset(args.data, truth)
    result = learn(data, config, truth)
    _emit(result.to_dict(include_timings=args.timings, include_contests=args.contests), args.out)
    return 0


def cmd_eval(args):
    a, b = load_simplex(args.a), load_simplex(args.b)
    est = tv_uniform(a, b, args.mode, args.budget, RngStream(args.seed))
    _emit(est.to_dict(), args.out)
    return 0


def cmd_bound(args):
    data = load_dataset(args.data)
    params = IsoperimetryParams(args.theta_lower, args.theta_upper)
    noise = NoiseModel.from_config(args.snr, data.sigma) if args.snr is not None else None
    ball = bounding_ball(data, params, noise, args.delta, args.strict)
    _emit(ball.to_dict(), args.out)
    return 0


def cmd_cover(args):
    ball = load_ball(args.ball)
    if args.method == "grid":
        cov = grid_covering(ball, args.eps, args.cap)
    else:
        cov = random_covering(ball, args.eps, RngStream(args.seed), args.cap)
    out = cov.to_dict()
    if args.verify:
        out["verification"] = verify_cover(cov, args.verify, RngStream(args.seed).child("probe")).to_dict()
    _emit(out, args.out)
    return 0


def cmd_complexity(args):
    inputs = {"dim": args.dim, "theta_lower": args.theta_lower, "theta_upper": args.theta_upper,
              "ratio": args.ratio, "radius": args.radius, "vol_root": args.vol_root,
              "eps": args.eps, "delta": args.delta, "M": args.M, "snr": args.snr}
    need = {"thm1": ("M", "eps", "delta"), "thm2": ("dim", "theta_upper", "eps", "delta"),
            "thm3": ("dim", "theta_lower", "theta_upper", "eps", "delta"),
            "lemma1": ("dim", "theta_lower", "delta")}[args.formula]
    missing = [k for k in need if inputs[k] is None]
    if missing:
        raise ParameterError(f"{args.formula} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))
    used = {k: v for k, v in inputs.items() if k in need or k in ("ratio", "radius", "vol_root", "snr")}
    _emit(complexity_report(args.formula, **used), args.out)
    return 0


def cmd_sweep(args):
    mapping = load_config(args.config)
    mapping.update(_parse_sets(args.set))
    rows = sweep(mapping, _threads(args), timings=args.timings)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simplexlearn", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"simplexlearn {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample a noisy dataset from a simplex")
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--sigma", type=float)
    g.add_argument("--snr", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--truth", help="simplex JSON/CSV (default: standard simplex)")
    g.add_argument("--out", required=True, help="dataset .csv or .json")
    g.set_defaults(func=cmd_gen)

    lr = sub.add_parser("learn", help="run the three-stage learner on a dataset")
    lr.add_argument("--data", required=True)
    lr.add_argument("--config", help="flat key = value config file")
    lr.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    lr.add_argument("--seed", type=int)
    lr.add_argument("--truth", help="true simplex; enables oracle scale and tv_to_truth")
    lr.add_argument("--threads", type=int, help=f"thread cap (default ${THREADS_ENV} or 1)")
    lr.add_argument("--timings", action="store_true", help="include wall-clock stage timings")
    lr.add_argument("--contests", action=argparse.BooleanOptionalAction, default=None,
                    help="force the contest matrix in or out of the JSON")
    lr.add_argument("--out")
    lr.set_defaults(func=cmd_learn)

    e = sub.add_parser("eval", help="TV distance between two uniform simplices")
    e.add_argument("--a", required=True)
    e.add_argument("--b", required=True)
    e.add_argument("--mode", choices=("exact", "mc"), default="exact")
    e.add_argument("--budget", type=int, default=20_000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bound", help="bounding ball from a dataset")
    b.add_argument("--data", required=True)
    b.add_argument("--theta-lower", type=float, required=True)
    b.add_argument("--theta-upper", type=float, required=True)
    b.add_argument("--snr", type=float, help="configured SNR (default: plug-in estimate)")
    b.add_argument("--delta", type=float, default=0.1)
    b.add_argument("--strict", action="store_true", help="refuse to run below the sample threshold")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bound)

    c = sub.add_parser("cover", help="covering set of a ball")
    c.add_argument("--ball", required=True)
    c.add_argument("--eps", type=float, required=True, help="covering resolution")
    c.add_argument("--method", choices=("grid", "random"), default="grid")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--cap", type=int, default=COVERING_CAP)
    c.add_argument("--verify", type=int, default=0, metavar="PROBES")
    c.add_argument("--out")
    c.set_defaults(func=cmd_cover)

    x = sub.add_parser("complexity", help="sample-size calculators")
    x.add_argument("--formula", choices=("thm1", "thm2", "thm3", "lemma1"), required=True)
    x.add_argument("--dim", type=int)
    x.add_argument("--theta-lower", type=float)
    x.add_argument("--theta-upper", type=float)
    x.add_argument("--ratio", type=float, help="R / Vol(S)^(1/K)")
    x.add_argument("--radius", type=float)
    x.add_argument("--vol-root", type=float)
    x.add_argument("--eps", type=float)
    x.add_argument("--delta", type=float)
    x.add_argument("--M", type=int)
    x.add_argument("--snr", type=float)
    x.add_argument("--out")
    x.set_defaults(func=cmd_complexity)

    s = sub.add_parser("sweep", help="grid of experiments to CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--set", action="append", metavar="KEY=VALUE")
    s.add_argument("--threads", type=int)
    s.add_argument("--timings", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            status = args.func(args)
        for w in caught:
            print(f"simplexlearn {args.command}: warning: {w.message}", file=sys.stderr)
        return status
    except ParameterError as exc:
        parser.print_usage(sys.stderr)
        print(f"simplexlearn {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (SimplexLearnError, OSError) as exc:
        print(f"simplexlearn {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
