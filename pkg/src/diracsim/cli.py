"""Command-line entry point.

    diracsim <experiment> --config FILE [--out DIR] [--set key=value ...]
    diracsim plot-data --run DIR

Exit codes: 0 success, 2 validation error, 3 numerical-guard trip.
"""

import argparse
import sys

from .config import KINDS, parse_config
from .errors import ConfigError, GuardError
from .experiments import emit_plot_data, run_experiment

__all__ = ["main"]


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="diracsim",
        description="Classical simulator for trapped-ion relativistic quantum mechanics models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run a {kind} experiment")
        sp.add_argument("--config", required=True, help="key = value config file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config value (flags win over the file)",
        )
        sp.add_argument(
            "--plot-data",
            action="store_true",
            help="also emit gnuplot-style matrices",
        )
    pd = sub.add_parser("plot-data", help="emit plot matrices for a finished run")
    pd.add_argument("--run", required=True, help="output directory of a finished run")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "plot-data":
        written = emit_plot_data(args.run)
        print(f"wrote {len(written)} plot files under {args.run}/plotdata")
        return 0

    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2

    overrides = list(args.overrides)
    try:
        cfg = parse_config(text, overrides=overrides)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 2
    if cfg.kind != args.command:
        print(
            f"config error: config is for {cfg.kind!r} but the "
            f"{args.command!r} subcommand was invoked",
            file=sys.stderr,
        )
        return 2

    out_dir = args.out or f"out/{cfg.kind}"
    try:
        manifest = run_experiment(cfg, out_dir)
    except GuardError as exc:
        print(f"numerical guard tripped: {exc}", file=sys.stderr)
        return 3
    for key in sorted(manifest.summary):
        print(f"{key} = {manifest.summary[key]}")
    print(f"manifest: {manifest.path}")
    if args.plot_data:
        emit_plot_data(out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
