"""``simulate`` command line entry point.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 anchor-check failure (only with ``--check-anchors``).
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import ConfigError, NumericalError
from .scenarios import apply_overrides, builtin_scenarios, load_config, run_scenario, write_result

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_ANCHORS = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Run an interference scenario (YAML file or builtin name) and write its result tables.",
    )
    p.add_argument("config", nargs="?", help="scenario YAML file or builtin scenario name")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", help="output directory (default: the config's output_dir)")
    p.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override a config field, e.g. --set scan.shots_per_point=500 (repeatable)",
    )
    p.add_argument("--list-scenarios", action="store_true", help="list builtin scenarios and exit")
    p.add_argument("--check-anchors", action="store_true", help="exit 3 if any reference-value check fails")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list_scenarios:
        for name in builtin_scenarios():
            print(name)
        return EXIT_OK
    if not args.config:
        print("simulate: error: a config path or builtin name is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, args.overrides)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        result = run_scenario(cfg)
    except ConfigError as exc:
        print(f"simulate: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"simulate: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = write_result(result, args.out or cfg.output_dir)
    print(f"{result.name}: visibility {result.fit.visibility:.4f} +/- {result.fit.visibility_stderr:.4f}, "
          f"net {result.net_visibility:.4f}; results in {out}")
    for a in result.anchors:
        print("  " + a.line())
    if args.check_anchors and not result.anchors_ok():
        return EXIT_ANCHORS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
