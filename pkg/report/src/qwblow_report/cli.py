"""CLI: qwblow-report <kind> <input.csv> --out fig.png [--tau0 X]."""

import argparse
import sys

from .figures import FIGURE_KINDS, SchemaError, render


def build_parser():
    ap = argparse.ArgumentParser(
        prog="qwblow-report",
        description="render a qwblow CSV into a publication-style figure",
    )
    ap.add_argument("kind", choices=FIGURE_KINDS)
    ap.add_argument("input_csv")
    ap.add_argument("--out", required=True, help="output image path (.png)")
    ap.add_argument("--tau0", type=float, default=None,
                    help="reference tau0 line (lifespan_trend; default from the CSV)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args.kind, args.input_csv, args.out, tau0=args.tau0)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
