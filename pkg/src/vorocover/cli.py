"""Command-line entry point.

``vorocover run`` executes a scenario and writes the round log plus a
summary; ``vorocover make-paper-scenario`` emits the bundled large-structure
scenario. Exit codes: 0 success, 1 configuration error, 2 timeout,
3 safety abort.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, bundled, config, geometry, sim

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_TIMEOUT = 2
EXIT_ABORT = 3

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vorocover",
        description="Multi-agent 3D structure inspection simulator.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario from a config file")
    run_p.add_argument("--config", required=True, help="scenario config path")
    run_p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key")
    run_p.add_argument("--log", default=None, help="round log output path")
    run_p.add_argument("--summary", default=None, help="summary output path")
    run_p.add_argument("--workers", type=int, default=1,
                       help="worker threads for per-agent computation")

    gen_p = sub.add_parser("make-paper-scenario",
                           help="emit the bundled large-structure scenario")
    gen_p.add_argument("--out", required=True, help="output directory")
    return parser


def _cmd_run(args) -> int:
    try:
        scenario = config.parse_config(args.config, overrides=args.overrides)
    except (config.ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    log_path = Path(args.log) if args.log else Path(scenario.log_path)
    summary_path = (Path(args.summary) if args.summary
                    else log_path.with_suffix(".summary.json"))

    try:
        log = sim.run(scenario, workers=args.workers)
    except (sim.ScenarioError, geometry.MeshFormatError,
            geometry.DegenerateMeshError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except sim.SimulationAbort as exc:
        print(f"safety abort: {exc}", file=sys.stderr)
        if exc.partial_log is not None:
            sim.write_log(exc.partial_log, log_path)
            sim.write_summary(exc.partial_log, summary_path)
            print(f"partial log written to {log_path}", file=sys.stderr)
        return EXIT_ABORT

    sim.write_log(log, log_path)
    sim.write_summary(log, summary_path)
    s = log.summary()
    if log.success:
        pair = (f"{s['min_pairwise_dist_m']:.2f} m"
                if s["min_pairwise_dist_m"] is not None else "n/a")
        print(f"inspection complete at t = {s['completion_time_s']:.2f} s "
              f"({len(log.records)} rounds); "
              f"min pairwise {pair}, min target {s['min_target_dist_m']:.2f} m")
        print(f"log: {log_path}\nsummary: {summary_path}")
        return EXIT_OK
    print(f"timeout: inspection incomplete after t_max = {scenario.t_max} s",
          file=sys.stderr)
    print(f"log: {log_path}\nsummary: {summary_path}")
    return EXIT_TIMEOUT


def _cmd_make_scenario(args) -> int:
    try:
        mesh_path, config_path = bundled.write_scenario(args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"mesh: {mesh_path}\nconfig: {config_path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "make-paper-scenario":
        return _cmd_make_scenario(args)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
