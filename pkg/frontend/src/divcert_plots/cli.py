"""render: turn a divcert artifact into a figure.

    render --in out/blowup.csv --kind blowup --out fig/blowup.png

kinds:
    blowup   blow-up table CSV; requires the certificate JSON written
             next to it (same stem) for the growth-floor reference line
    tail     certificates JSON; plots one row's enclosure bounds
    sobolev  membership report JSON

Exit codes: 0 image written; 64 usage; 65 input parsed but carries no
plottable data (schema mismatch, empty table, missing floor); 66 input
or sibling file unreadable.
"""

from __future__ import annotations

import argparse
import os
import sys

from .figures import blowup_figure, sobolev_figure, tail_figure
from .readers import (DataError, certificates_c0, read_blowup_rows,
                      read_certificates, read_sobolev, tail_bounds)

EXIT_OK = 0
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66

KINDS = ("blowup", "tail", "sobolev")


def _build(kind, path):
    if kind == "blowup":
        rows = read_blowup_rows(path)
        sibling = os.path.splitext(path)[0] + ".json"
        doc = read_certificates(sibling)
        return blowup_figure(rows, certificates_c0(doc))
    if kind == "tail":
        doc = read_certificates(path)
        k, pairs = tail_bounds(doc)
        if len(pairs) < 2:
            raise DataError("tail figure needs at least two enclosure bounds")
        return tail_figure(k, pairs)
    rep = read_sobolev(path)
    return sobolev_figure(rep)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="render",
        description="Figures for divcert artifacts; a pure view of the "
                    "CSV/JSON files the divcert CLI writes.")
    parser.add_argument("--in", dest="inp", required=True,
                        help="artifact path (CSV or JSON)")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="image path")
    parser.add_argument("--dpi", type=int, default=144)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    try:
        fig, _ = _build(args.kind, args.inp)
    except OSError as exc:
        print(f"render: cannot read input: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    except DataError as exc:
        print(f"render: {exc}", file=sys.stderr)
        return EXIT_DATA

    parent = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(parent, exist_ok=True)
    fig.savefig(args.out, dpi=args.dpi)

    import matplotlib.pyplot as plt

    plt.close(fig)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
