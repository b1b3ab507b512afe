"""Command-line harness: run scenarios, emit presets, summarize runs."""

import argparse
import os
import sys
from pathlib import Path

from .errors import ConfigurationError, SimulationFault
from .scenario import load_config, preset, run_scenario, save_config, summarize


def _default_out_root():
    return Path(os.environ.get("UFLS_OUT", "ufls-runs"))


def _cmd_run(args):
    config = load_config(args.config)
    config = config.with_seeds(noise_seed=args.seed_noise, filter_seed=args.seed_filter)
    out_dir = Path(args.out) if args.out else _default_out_root() / Path(args.config).stem
    try:
        artifacts = run_scenario(config, out_dir=out_dir, emit_plot_data=args.emit_plot_data)
    except SimulationFault as exc:
        print(f"simulation fault: {exc}", file=sys.stderr)
        print(f"partial artifacts in {out_dir}", file=sys.stderr)
        return 3
    print(summarize(artifacts))
    print(f"artifacts written to {out_dir}")
    return 0


def _cmd_preset(args):
    config = preset(args.name)
    out_dir = Path(args.out) if args.out else _default_out_root()
    path = save_config(config, out_dir / f"{args.name}.yaml")
    print(f"wrote {path}")
    return 0


def _cmd_summarize(args):
    run_dir = Path(args.run_dir)
    if not (run_dir / "summary.json").exists():
        print(f"no summary.json under {run_dir}", file=sys.stderr)
        return 2
    print(summarize(run_dir))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ufls",
        description="Closed-loop underfrequency protection simulator: "
        "particle-filter tracking, horizon prediction, staged shedding and DER compensation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config file")
    p_run.add_argument("config", help="scenario YAML file")
    p_run.add_argument("--seed-noise", type=int, default=None, help="override measurement-noise seed")
    p_run.add_argument("--seed-filter", type=int, default=None, help="override filter seed")
    p_run.add_argument("--out", default=None, help="output directory (default: $UFLS_OUT/<config-stem>)")
    p_run.add_argument("--emit-plot-data", action="store_true",
                       help="also write downsampled series and per-prediction trajectories")
    p_run.set_defaults(func=_cmd_run)

    p_preset = sub.add_parser("preset", help="write a calibrated case-study config")
    p_preset.add_argument("name", choices=["case-i", "case-ii", "case-iii"])
    p_preset.add_argument("--out", default=None, help="directory for the config file (default: $UFLS_OUT)")
    p_preset.set_defaults(func=_cmd_preset)

    p_sum = sub.add_parser("summarize", help="report on a written run directory")
    p_sum.add_argument("run_dir")
    p_sum.set_defaults(func=_cmd_summarize)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"file not found: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
