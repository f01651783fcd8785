"""Command-line front end: attack, report, and generate subcommands.

Failures exit nonzero after printing a single machine-readable JSON line
on stderr: {"error": "<type>", "message": "<detail>"}.
"""

import argparse
import json
import sys

from .errors import ConfigError, HardLabelError
from .fixtures import (
    examples_from_arrays,
    make_linear_model,
    make_mlp_fixture,
    sample_gaussian_blobs,
)
from .harness import ALGOS, MODES, RunConfig, cmd_attack, cmd_report
from .metrics import CURVE_KINDS, DEFAULT_CAP
from .oracle import save_dataset, save_model


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hardlabel",
        description="Hard-label decision-boundary attack toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    atk = sub.add_parser("attack", help="attack every example of a dataset")
    atk.add_argument("--model", required=True, help="model JSON file")
    atk.add_argument("--data", required=True, help="dataset CSV file")
    atk.add_argument("--epsilon", type=float, required=True,
                     help="L-infinity success threshold")
    atk.add_argument("--budget", type=int, default=10000,
                     help="query budget per example (default 10000)")
    atk.add_argument("--tol", type=float, default=1e-3,
                     help="binary-search tolerance (default 1e-3)")
    atk.add_argument("--algo", choices=ALGOS, default="hierarchical")
    atk.add_argument("--mode", choices=MODES, default="early-stop")
    atk.add_argument("--seed", type=int, default=0,
                     help="seed for the random baseline")
    atk.add_argument("--parallelism", type=int, default=1)
    atk.add_argument("--out", required=True, help="results JSON file to write")

    rep = sub.add_parser("report", help="aggregate a results file")
    rep.add_argument("--results", required=True, help="results JSON file")
    rep.add_argument("--epsilon", type=float, required=True)
    rep.add_argument("--cap", type=float, default=DEFAULT_CAP,
                     help="distance charged to failed attacks (default 1.0)")
    rep.add_argument("--out", help="report JSON file to write")
    rep.add_argument("--curves", help="curve CSV file to write")
    rep.add_argument("--curve-kind", choices=CURVE_KINDS,
                     default="asr_vs_queries")

    gen = sub.add_parser("generate", help="write synthetic fixture files")
    gen.add_argument("kind",
                     choices=("linear-model", "mlp-model", "gaussian-dataset"))
    gen.add_argument("--dim", type=int, default=16)
    gen.add_argument("--classes", type=int, default=2)
    gen.add_argument("--samples", type=int, default=200,
                     help="dataset rows, or training draws for mlp-model")
    gen.add_argument("--separation", type=float, default=0.5,
                     help="distance between Gaussian class means")
    gen.add_argument("--hidden", type=int, default=None,
                     help="hidden width for mlp-model (default max(8, dim))")
    gen.add_argument("--weights", default=None,
                     help="comma-separated weights for linear-model")
    gen.add_argument("--threshold", type=float, default=None,
                     help="decision threshold for linear-model")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    return parser


def _run_generate(args):
    if args.dim < 1 or args.samples < 0 or args.classes < 2:
        raise ConfigError("need dim >= 1, samples >= 0, classes >= 2")
    if args.kind == "linear-model":
        if args.weights is not None:
            weights = [float(w) for w in args.weights.split(",")]
            if len(weights) != args.dim:
                raise ConfigError(
                    f"--weights has {len(weights)} entries, --dim is {args.dim}"
                )
        else:
            weights = [1.0] * args.dim
        threshold = args.threshold if args.threshold is not None else args.dim / 2.0
        save_model(make_linear_model(weights, threshold), args.out)
    elif args.kind == "mlp-model":
        model = make_mlp_fixture(
            args.dim,
            n_train=max(args.samples, 1),
            classes=args.classes,
            hidden=args.hidden,
            separation=args.separation,
            seed=args.seed,
        )
        save_model(model, args.out)
    else:
        feats, labels, _ = sample_gaussian_blobs(
            args.dim, args.samples, args.classes, args.separation, args.seed
        )
        save_dataset(examples_from_arrays(feats, labels), args.out)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "attack":
            config = RunConfig(
                model_path=args.model,
                data_path=args.data,
                out_path=args.out,
                epsilon=args.epsilon,
                budget=args.budget,
                tol=args.tol,
                algo=args.algo,
                mode=args.mode,
                seed=args.seed,
                parallelism=args.parallelism,
            )
            cmd_attack(config)
        elif args.command == "report":
            cmd_report(
                args.results,
                args.epsilon,
                cap=args.cap,
                out_path=args.out,
                curves_path=args.curves,
                curve_kind=args.curve_kind,
            )
        else:
            _run_generate(args)
    except (HardLabelError, OSError, ValueError) as exc:
        line = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(line), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
