"""CLI: viz <trajectories|timeline|controls> --log PATH [--mesh PATH] --out PATH."""

from __future__ import annotations

import argparse
import sys

from . import __version__, logframe, meshio, plots


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viz", description="Render figures from inspection-run logs.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("trajectories", "3D trajectories over the shaded mesh"),
            ("timeline", "inspection progress over time"),
            ("controls", "per-agent control inputs over time")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--log", required=True, help="round log (JSON lines)")
        p.add_argument("--mesh", default=None, help="object mesh (v/f format)")
        p.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        frame = logframe.load_log(args.log)
    except (logframe.SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    mesh = None
    if args.mesh is not None:
        try:
            mesh = meshio.load_mesh(args.mesh)
        except (meshio.MeshError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1

    try:
        if args.command == "trajectories":
            if mesh is None:
                print("error: trajectories requires --mesh", file=sys.stderr)
                return 1
            info = plots.plot_trajectories(frame, mesh[0], mesh[1], args.out)
        elif args.command == "timeline":
            total = len(mesh[1]) if mesh is not None else None
            info = plots.plot_timeline(frame, args.out, facets_total=total)
        else:
            info = plots.plot_controls(frame, args.out)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(" ".join(f"{k}={v}" for k, v in info.items()))
    return 0


if __name__ == "__main__":
    sys.exit(main())
