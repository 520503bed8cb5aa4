"""Readers for the divcert artifact schemas.

Each reader validates the file against the documented schema before
returning plain Python structures. Schema problems raise DataError with
the exact column or field diff so a renamed column fails loudly instead
of producing an empty plot.
"""

from __future__ import annotations

import csv
import json

BLOWUP_HEADER = ["k", "t_k", "log_Rp_k", "L_k", "growth_ratio",
                 "abs_S", "abs_err"]
CERTIFICATES_FORMAT = "divcert.certificates/1"


class DataError(Exception):
    """Input file exists but does not carry plottable data."""


def _float_or_none(cell):
    return None if cell == "" else float(cell)


def read_blowup_rows(path):
    """Rows of the blow-up table CSV, numeric where filled."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != BLOWUP_HEADER:
            missing = sorted(set(BLOWUP_HEADER) - set(header or []))
            extra = sorted(set(header or []) - set(BLOWUP_HEADER))
            raise DataError(
                f"blow-up CSV header mismatch: missing {missing}, extra {extra}")
        rows = []
        for rec in reader:
            if len(rec) != len(BLOWUP_HEADER):
                raise DataError(f"row {len(rows) + 2} has {len(rec)} cells, "
                                f"expected {len(BLOWUP_HEADER)}")
            rows.append({
                "k": int(rec[0]),
                **{name: _float_or_none(cell)
                   for name, cell in zip(BLOWUP_HEADER[1:], rec[1:])},
            })
    if not rows:
        raise DataError("blow-up CSV has a header but no rows")
    return rows


def read_certificates(path):
    """The certificates JSON document; used for the c0 overlay and for
    the tail figure's enclosure bounds."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DataError(f"certificates file is not valid JSON: {exc}") from exc
    fmt = doc.get("format") if isinstance(doc, dict) else None
    if fmt != CERTIFICATES_FORMAT:
        raise DataError(
            f"expected format {CERTIFICATES_FORMAT!r}, found {fmt!r}")
    missing = [key for key in ("c0", "rows") if key not in doc]
    if missing:
        raise DataError(f"certificates document lacks fields {missing}")
    return doc


def certificates_c0(doc):
    if doc["c0"] is None:
        raise DataError("certificates document records no growth floor")
    return float(doc["c0"])


def tail_bounds(doc):
    """(j, log bound) pairs from the certificate row carrying the most
    enclosures, ties to the smallest target index.

    Bounds live on the log scale in the document; they are often far
    below the smallest positive binary64, so they stay logarithmic here.
    """
    best = None
    for row in doc["rows"]:
        encs = row.get("enclosures", [])
        if encs and (best is None or len(encs) > len(best[1])):
            best = (int(row["k"]), encs)
    if best is None:
        raise DataError("no certificate row carries enclosures")
    k, encs = best
    pairs = [(int(e["j"]), float(e["log_bound"])) for e in encs]
    pairs.sort()
    return k, pairs


def read_sobolev(path):
    """The membership report JSON, with partials decoded to floats."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DataError(f"report is not valid JSON: {exc}") from exc
    required = ("s", "j_max", "partial_norms_squared", "tail_bound",
                "norm_squared")
    missing = [key for key in required if not isinstance(doc, dict) or key not in doc]
    if missing:
        raise DataError(f"membership report lacks fields {missing}")
    partials = [float(v) for v in doc["partial_norms_squared"]]
    if not partials:
        raise DataError("membership report has no partial norms")
    return {
        "s": float(doc["s"]),
        "j_max": int(doc["j_max"]),
        "partials": partials,
        "tail_bound": float(doc["tail_bound"]),
        "norm_squared": float(doc["norm_squared"]),
    }
