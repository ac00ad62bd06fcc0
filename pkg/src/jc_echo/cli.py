"""jc-echo command line: run config files or built-in preset scenarios.

Exit codes: 0 success, 1 configuration error, 2 numerical-health failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, load_config, preset_configs, preset_names
from .sweep import NumericalHealthError, emit_csv, run_sweep


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jc-echo",
        description=(
            "Phase-kick echo simulator: sweep the echo protocol for a "
            "two-level system coupled to a damped oscillator and emit CSV."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a config file")
    run.add_argument("--config", required=True, help="path to a key=value config file")
    run.add_argument("--out", help="output CSV path (overrides the config)")
    run.add_argument(
        "--propagator",
        choices=("stepper", "oracle"),
        help="integration engine (overrides the config)",
    )

    preset = sub.add_parser("preset", help="run a built-in scenario")
    preset.add_argument("name", choices=preset_names())
    preset.add_argument(
        "--kappa-over-g",
        type=float,
        help="decay ratio for presets that leave it selectable",
    )
    preset.add_argument(
        "--out",
        default=".",
        help="directory that receives the canonical CSV file(s)",
    )
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.propagator:
        config = replace(config, propagator=args.propagator)
    out = args.out or config.output
    if not out:
        raise ConfigError("no output path: set key 'output' or pass --out")
    result = run_sweep(config)
    emit_csv(result, out)
    print(out)
    return 0


def _cmd_preset(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for filename, config in preset_configs(args.name, kappa_over_g=args.kappa_over_g):
        result = run_sweep(config)
        path = out_dir / filename
        emit_csv(result, path)
        print(path)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_preset(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalHealthError as exc:
        print(f"numerical health failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
