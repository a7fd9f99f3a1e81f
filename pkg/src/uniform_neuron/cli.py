"""Command-line entry point: ``fit``, ``certify`` and ``gen``."""

import argparse
import sys

import numpy as np

from . import data as datamod
from .activations import make_activation
from .data import WeightVector, load_dataset, minmax_normalize
from .experiment import (
    EXIT_OK,
    ExperimentConfig,
    error_object,
    exit_code_for,
    load_weights,
    run_experiment,
    write_report,
)
from .stationarity import certify


def _add_data_args(p):
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["ucr", "csv"], default="csv")
    p.add_argument("--target", help="target column (csv only)")
    p.add_argument("--activation", choices=["sigmoid", "identity", "leaky_relu"], default="leaky_relu")
    p.add_argument("--alpha", type=float, default=None, help="Leaky ReLU slope (default 0.01)")
    p.add_argument("--tau", type=float, default=None, help="max-deviation tolerance (default 1e-6*max(1, Delta))")
    p.add_argument("--normalize", action="store_true", help="min-max scale features to [0, 1]")
    p.add_argument("--report", default="-", help="output JSON path ('-' for stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="uniform-neuron", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit units step by step and certify each step")
    _add_data_args(fit)
    fit.add_argument("--eps", type=float, default=1e-6)
    fit.add_argument("--steps", type=int, default=1)
    fit.add_argument("--stall-tol", type=float, default=None)
    fit.add_argument("--continue-past-tolerance", action="store_true")
    fit.add_argument("--seed", type=int, default=None)
    fit.add_argument("--lp-method", choices=["simplex", "highs"], default="simplex")
    fit.add_argument("--no-timings", action="store_true", help="omit timings so reports are byte-reproducible")

    cert = sub.add_parser("certify", help="certify externally supplied weights")
    _add_data_args(cert)
    cert.add_argument("--weights", required=True, help="JSON array [w0, w1, ..., wd]")

    gen = sub.add_parser("gen", help="write a synthetic csv dataset (target column 'y')")
    gen.add_argument("--kind", choices=["tent", "planted", "random"], required=True)
    gen.add_argument("--n", type=int, default=10)
    gen.add_argument("--d", type=int, default=1)
    gen.add_argument("--activation", choices=["sigmoid", "identity", "leaky_relu"], default="leaky_relu")
    gen.add_argument("--alpha", type=float, default=None)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--output", required=True)
    return parser


def _fit(args):
    config = ExperimentConfig(
        input=args.input,
        format=args.format,
        target=args.target,
        activation=args.activation,
        alpha=args.alpha,
        eps=args.eps,
        tau=args.tau,
        steps=args.steps,
        stall_tol=args.stall_tol,
        continue_past_tolerance=args.continue_past_tolerance,
        normalize=args.normalize,
        report=args.report,
        seed=args.seed,
        lp_method=args.lp_method,
        timings=not args.no_timings,
    )
    report, code = run_experiment(config)
    write_report(report, args.report)
    return code


def _certify(args):
    report = {"schema_version": 1, "status": "ok"}
    try:
        act = make_activation(args.activation, args.alpha)
        data = load_dataset(args.input, args.format, args.target)
        if args.normalize:
            data = minmax_normalize(data)
        W = WeightVector.from_array(load_weights(args.weights))
        report["certificate"] = certify(data, act, W, args.tau).to_dict()
        code = EXIT_OK
    except Exception as exc:  # noqa: BLE001
        code = exit_code_for(exc)
        report["status"] = "error"
        report["error"] = error_object(exc)
    write_report(report, args.report)
    return code


def _gen(args):
    rng = np.random.default_rng(args.seed)
    if args.kind == "tent":
        ds = datamod.tent()
    elif args.kind == "planted":
        ds, _ = datamod.planted(make_activation(args.activation, args.alpha), args.n, args.d, rng)
    else:
        ds = datamod.random_dataset(args.n, args.d, rng)
    datamod.write_csv(ds, args.output)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"fit": _fit, "certify": _certify, "gen": _gen}[args.command]
    try:
        return handler(args)
    except Exception as exc:  # noqa: BLE001
        code = exit_code_for(exc)
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
