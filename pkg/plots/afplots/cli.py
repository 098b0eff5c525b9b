"""afplot: render solver CSV outputs to image files."""

import argparse
import sys

from . import render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="afplot", description="Render afacoustics CSV outputs to figures")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigs", help="eigenvalue scatter with unit circle")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--title")

    p = sub.add_parser("convergence", help="log-log errors with slope-3 line")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--var", default="p", choices=("p", "u", "v"))
    p.add_argument("--title")

    p = sub.add_parser("surface", help="3D surface of a snapshot column")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--field", default="speed")
    p.add_argument("--title")

    p = sub.add_parser("contour", help="filled contours of a snapshot column")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--field", default="speed")
    p.add_argument("--title")

    p = sub.add_parser("profile", help="radial speed profile")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--title")

    args = ap.parse_args(argv)
    try:
        if args.command == "eigs":
            rho = render.eig_scatter(args.input, args.output, title=args.title)
            print(f"{args.output}: max |lambda| = {rho:.9f}")
        elif args.command == "convergence":
            slope = render.convergence_loglog(args.input, args.output,
                                              var=args.var, title=args.title)
            print(f"{args.output}: fitted order {slope:.3f}")
        elif args.command == "surface":
            render.field_surface(args.input, args.output, field=args.field,
                                 title=args.title)
        elif args.command == "contour":
            render.field_contour(args.input, args.output, field=args.field,
                                 title=args.title)
        elif args.command == "profile":
            render.radial_profile(args.input, args.output, title=args.title)
    except render.SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
