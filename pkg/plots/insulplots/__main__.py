"""Script entry: render one figure from files to a file.

    python -m insulplots field --vtk solution.vtk --thickness thickness.csv --out field.png
    python -m insulplots profile --vtk ball_solution.vtk --thickness ball_thickness.csv --out profile.png
    python -m insulplots mass-curve --csv mass_sweep.csv --out curve.png
    python -m insulplots sweep --csv ellipsoid_sweep.csv --out sweep.png
"""

import argparse
import sys

from .ioformats import ParseError
from .render import render_field, render_mass_curve, render_profile, render_sweep


def main(argv=None):
    parser = argparse.ArgumentParser(prog="insulplots")
    subs = parser.add_subparsers(dest="kind", required=True)

    for kind in ("field", "profile"):
        sub = subs.add_parser(kind)
        sub.add_argument("--vtk", required=True)
        sub.add_argument("--thickness", required=True)
        sub.add_argument("--out", required=True)
        sub.add_argument("--scale", type=float, default=0.1,
                         help="film band width per unit thickness")
        sub.add_argument("--dpi", type=int, default=600)
    for kind in ("mass-curve", "sweep"):
        sub = subs.add_parser(kind)
        sub.add_argument("--csv", required=True)
        sub.add_argument("--out", required=True)
        sub.add_argument("--dpi", type=int, default=600)

    args = parser.parse_args(argv)
    try:
        if args.kind == "field":
            render_field(args.vtk, args.thickness, args.out,
                         scale=args.scale, dpi=args.dpi)
        elif args.kind == "profile":
            render_profile(args.vtk, args.thickness, args.out,
                           scale=args.scale, dpi=args.dpi)
        elif args.kind == "mass-curve":
            render_mass_curve(args.csv, args.out, dpi=args.dpi)
        else:
            render_sweep(args.csv, args.out, dpi=args.dpi)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
