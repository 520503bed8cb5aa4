"""Figure builders: annotation fidelity against the raw artifact cells."""

import csv
import json
import math
from statistics import median

import pytest

from divcert_plots.figures import blowup_figure, sobolev_figure, tail_figure
from divcert_plots.readers import (certificates_c0, read_blowup_rows,
                                   read_certificates, read_sobolev,
                                   tail_bounds)

LN2 = math.log(2.0)


class TestBlowupFigure:
    def test_annotations_equal_raw_cells(self, artifacts):
        rows = read_blowup_rows(artifacts["blowup_csv"])
        doc = read_certificates(artifacts["certs_json"])
        fig, notes = blowup_figure(rows, certificates_c0(doc))

        with open(artifacts["blowup_csv"], newline="") as handle:
            raw = list(csv.DictReader(handle))
        assert notes["k_last"] == int(raw[-1]["k"])
        assert notes["growth_ratio_last"] == float(raw[-1]["growth_ratio"])
        assert notes["c0"] == float(json.loads(
            artifacts["certs_json"].read_text())["c0"])

    def test_reference_line_uses_recorded_floor(self, artifacts):
        rows = read_blowup_rows(artifacts["blowup_csv"])
        c0 = certificates_c0(read_certificates(artifacts["certs_json"]))
        fig, _ = blowup_figure(rows, c0)
        markers, reference = fig.axes[0].lines
        assert len(markers.get_xdata()) == 14
        for x, y in zip(reference.get_xdata(), reference.get_ydata()):
            assert y == pytest.approx(c0 * x, rel=1e-12)


class TestTailFigure:
    def test_slope_annotation_is_the_sanctioned_median(self, artifacts):
        doc = read_certificates(artifacts["certs_json"])
        k, pairs = tail_bounds(doc)
        fig, notes = tail_figure(k, pairs)

        raw = json.loads(artifacts["certs_json"].read_text())
        row = next(r for r in raw["rows"] if int(r["k"]) == k)
        logs = [float(e["log_bound"]) for e in row["enclosures"]]
        expect = median((a - b) / LN2 for a, b in zip(logs, logs[1:]))
        assert notes["median_log2_ratio"] == expect
        assert notes["count"] == len(logs)

    def test_reference_line_halves_per_index(self, artifacts):
        doc = read_certificates(artifacts["certs_json"])
        k, pairs = tail_bounds(doc)
        fig, _ = tail_figure(k, pairs)
        _, reference = fig.axes[0].lines
        ys = reference.get_ydata()
        for a, b in zip(ys, ys[1:]):
            assert b - a == pytest.approx(-1.0, abs=1e-12)

    def test_single_enclosure_rejected(self):
        with pytest.raises(ValueError):
            tail_figure(1, [(2, -5.0)])


class TestSobolevFigure:
    def test_annotations_equal_report_fields(self, artifacts):
        rep = read_sobolev(artifacts["sobolev_json"])
        fig, notes = sobolev_figure(rep)

        raw = json.loads(artifacts["sobolev_json"].read_text())
        assert notes["norm_squared"] == float(raw["norm_squared"])
        assert notes["tail_bound"] == float(raw["tail_bound"])
        assert notes["j_max"] == int(raw["j_max"])
        assert notes["s"] == float(raw["s"])

    def test_curve_is_the_partial_sequence(self, artifacts):
        rep = read_sobolev(artifacts["sobolev_json"])
        fig, _ = sobolev_figure(rep)
        curve = fig.axes[0].lines[0]
        assert list(curve.get_ydata()) == rep["partials"]
