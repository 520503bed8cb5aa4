"""Figures for divcert artifacts.

A pure view layer: it consumes the CSV and JSON files the divcert CLI
writes and never recomputes a certified quantity. The one sanctioned
derived statistic is the tail figure's median log2 bound ratio, which
summarizes the decay the enclosures already certify.
"""

from .figures import blowup_figure, sobolev_figure, tail_figure
from .readers import (DataError, read_blowup_rows, read_certificates,
                      read_sobolev)

__version__ = "1.0.0"

__all__ = [
    "DataError",
    "blowup_figure",
    "read_blowup_rows",
    "read_certificates",
    "read_sobolev",
    "sobolev_figure",
    "tail_figure",
]
