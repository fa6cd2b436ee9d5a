"""Command-line entry point: ``borat {run,sweep,verify,plot,bench}``.

Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 failed
verification.  ``BORAT_OUTPUT_DIR`` sets the default output directory.
"""

from __future__ import annotations

import argparse
import ast
import json
import logging
import sys
from pathlib import Path

from ..errors import ContractViolation, InvalidInputError, NumericalError
from ..objectives import PROBLEMS
from ..optimizer import OPTIMIZERS, BoratConfig
from ..projections import FeasibleRegion
from ..trace import FORMATS, TraceParseError
from .config import RunConfig, default_output_dir

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0 or value != value or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


def _bool(text):
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _param(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = ast.literal_eval(raw)
    except (ValueError, SyntaxError):
        value = raw
    return key.strip(), value


def _add_run_args(p, out_help):
    p.add_argument("--problem", choices=PROBLEMS, default="lsq")
    p.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE",
                   help="problem parameter, e.g. n_train=128 or dataset='moons'")
    p.add_argument("--label-noise", type=float, default=0.0, help="mlp only: label flip probability")
    p.add_argument("--optimizer", choices=OPTIMIZERS, default="borat")
    p.add_argument("--n", type=int, default=None, help="bundle size (default 3, or 2 for alig)")
    p.add_argument("--eta", type=_positive_float, default=1.0, help="maximal learning rate")
    p.add_argument("--constraint", default="none", help="'none' or 'l2:<r>' (bound on squared norm)")
    p.add_argument("--momentum", type=float, default=0.0)
    budget = p.add_mutually_exclusive_group()
    budget.add_argument("--steps", type=int, default=None)
    budget.add_argument("--epochs", type=float, default=None)
    p.add_argument("--batch-size", type=_positive_int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resample", type=_bool, default=True, metavar="{true,false}")
    p.add_argument("--lower-bound", type=float, default=0.0)
    p.add_argument("--log-every", type=_positive_int, default=None,
                   help="steps between full-objective evaluations")
    p.add_argument("--out", type=Path, default=None, help=out_help)
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--no-timing", action="store_true", help="leave elapsed_s empty for byte-stable traces")


def build_parser():
    parser = _Parser(prog="borat", description="Stochastic bundle optimisation experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="train once and write a trace")
    _add_run_args(p, "trace file (default $BORAT_OUTPUT_DIR/<problem>_<optimizer>_seed<seed>.<format>)")
    p.add_argument("--dump-data", type=Path, default=None, help="write the training set as CSV")

    p = sub.add_parser("sweep", help="grid over eta x l2 radius")
    _add_run_args(p, "output directory (default $BORAT_OUTPUT_DIR/sweep_<problem>)")
    p.add_argument("--etas", type=_float_list, default=[0.01, 0.1, 1.0, 10.0])
    p.add_argument("--radii", type=_float_list, default=[50.0, 100.0, 150.0, 200.0, 250.0])
    p.add_argument("--workers", type=_positive_int, default=1)

    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument("suites", nargs="*", default=["all"],
                   help="qp-oracle kkt closed-form monotonicity duality rates step-structure "
                        "robustness gradients determinism all")
    p.add_argument("--quick", action="store_true", help="smaller problem counts")
    p.add_argument("--out", type=Path, default=None, help="also write the JSON report here")

    p = sub.add_parser("plot", help="render a trace or grid file as SVG")
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)

    p = sub.add_parser("bench", help="seconds per epoch across bundle sizes")
    _add_run_args(p, "CSV report (default: stdout only)")
    p.add_argument("--sizes", type=lambda s: [int(x) for x in s.split(",")], default=[2, 3, 4, 5])
    return parser


def config_from_args(args, out=None) -> RunConfig:
    n = args.n if args.n is not None else (2 if args.optimizer == "alig" else 3)
    steps, epochs = args.steps, args.epochs
    if steps is None and epochs is None:
        steps = 1000
    params = dict(args.param)
    if args.label_noise:
        if args.problem != "mlp":
            raise UsageError("--label-noise applies to the mlp problem only")
        params["label_noise"] = args.label_noise
    try:
        opt = BoratConfig(
            eta=args.eta, bundle_size=n, momentum=args.momentum,
            region=FeasibleRegion.parse(args.constraint), resample=args.resample,
            max_steps=steps, max_epochs=epochs, batch_size=args.batch_size,
            seed=args.seed, lower_bound=args.lower_bound,
        )
        return RunConfig(args.problem, opt, args.optimizer, params, out, args.log_every,
                         args.format, not args.no_timing, getattr(args, "dump_data", None))
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None


def _cmd_run(args):
    from .runner import run

    out = args.out or default_output_dir() / f"{args.problem}_{args.optimizer}_seed{args.seed}.{args.format}"
    cfg = config_from_args(args, out)
    try:
        trace = run(cfg)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None
    except (NumericalError, ContractViolation) as exc:
        partial = getattr(exc, "trace", None)
        done = len(partial.records) if partial is not None else 0
        print(json.dumps({"status": "failed", "error": str(exc), "steps_written": done,
                          "trace": str(out)}))
        return EXIT_RUNTIME
    logged = trace.logged()
    print(json.dumps({
        "status": trace.status, "trace": str(out), "steps": len(trace.records),
        "initial_objective": trace.initial_objective,
        "final_objective": logged[-1][1] if logged else None,
        "final_accuracy": trace.records[-1].accuracy if trace.records else None,
    }))
    return EXIT_OK if trace.status == "complete" else EXIT_RUNTIME


def _cmd_sweep(args):
    from .runner import sweep

    out = args.out or default_output_dir() / f"sweep_{args.problem}"
    cfg = config_from_args(args)
    try:
        grid = sweep(cfg, args.etas, args.radii, out_dir=out, workers=args.workers)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None
    print(json.dumps({"grid": str(Path(out) / "grid.csv"), "etas": grid.etas, "radii": grid.radii,
                      "failed_cells": grid.header.get("failures", {})}))
    return EXIT_OK


def _cmd_verify(args):
    from .checks import SUITES, run_suites

    names = args.suites or ["all"]
    unknown = [n for n in names if n != "all" and n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)} or all")
    results = run_suites(names, quick=args.quick,
                         on_result=lambda r: print(r.line(), file=sys.stderr, flush=True))
    report = {"passed": all(r.passed for r in results), "checks": [r.to_json() for r in results]}
    text = json.dumps(report, indent=2)
    print(text)
    if args.out is not None:
        Path(args.out).write_text(text + "\n")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _cmd_plot(args):
    from .plotting import plot_file

    if not args.input.exists():
        raise UsageError(f"no such file: {args.input}")
    try:
        plot_file(args.input, args.output)
    except TraceParseError as exc:
        print(f"borat plot: parse error in {args.input}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except InvalidInputError as exc:
        print(f"borat plot: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(str(args.output))
    return EXIT_OK


def _cmd_bench(args):
    from .bench import bench

    cfg = config_from_args(args)
    epochs = args.epochs if args.epochs is not None else 2.0
    rows = bench(cfg, args.sizes, epochs)
    lines = ["bundle_size,epochs,steps,seconds_per_epoch"]
    lines += [f"{r['bundle_size']},{r['epochs']:g},{r['steps']},{r['seconds_per_epoch']:.6f}" for r in rows]
    print("\n".join(lines))
    if args.out is not None:
        Path(args.out).write_text("\n".join(lines) + "\n")
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "verify": _cmd_verify, "plot": _cmd_plot,
            "bench": _cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"borat {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ContractViolation, OSError) as exc:
        print(f"borat {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        print(f"borat {args.command}: interrupted", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
