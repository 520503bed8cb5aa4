"""Symbol evaluation, angular rules, and the growth-condition checker."""

import math

import numpy as np
import pytest

import divcert as dc
from divcert.errors import DomainError, InputError

W1 = np.array([1.0])


def fd_slope(f, r, h=None):
    h = 1e-6 * r if h is None else h
    return (f(r + h) - f(r - h)) / (2.0 * h)


class TestSphereMeasure:
    def test_frozen_values(self):
        assert dc.sphere_measure(1) == 2.0
        assert dc.sphere_measure(2) == pytest.approx(2.0 * math.pi, rel=1e-15)
        assert dc.sphere_measure(3) == pytest.approx(4.0 * math.pi, rel=1e-15)


class TestAngularGrid:
    def test_n1_counting_measure(self):
        nodes, weights = dc.angular_grid(1)
        assert sorted(float(v[0]) for v in nodes) == [-1.0, 1.0]
        assert list(weights) == [1.0, 1.0]

    def test_weights_recover_total_measure(self):
        for n in (2, 3):
            nodes, weights = dc.angular_grid(n)
            assert float(np.sum(weights)) == pytest.approx(
                dc.sphere_measure(n), rel=1e-12)
            norms = np.sqrt((np.asarray(nodes) ** 2).sum(axis=1))
            assert np.allclose(norms, 1.0, atol=1e-12)


class TestBuiltinSymbols:
    def test_homogeneous_frozen_point(self):
        sym = dc.homogeneous(2.0, n=1)
        assert float(sym.phi(10.0, W1)) == 100.0
        assert float(sym.phi_dr(10.0, W1)) == 20.0
        assert float(sym.phi_drr(10.0, W1)) == 2.0

    @pytest.mark.parametrize("a", [1.5, 2.0, 3.0])
    def test_homogeneous_derivatives_match_finite_differences(self, a):
        sym = dc.homogeneous(a, n=1)
        for r in (3.0, 17.0, 240.0):
            assert float(sym.phi_dr(r, W1)) == pytest.approx(
                fd_slope(lambda q: float(sym.phi(q, W1)), r), rel=1e-6)
            assert float(sym.phi_drr(r, W1)) == pytest.approx(
                fd_slope(lambda q: float(sym.phi_dr(q, W1)), r), rel=1e-6)

    def test_r_log_r_frozen_point(self):
        sym = dc.r_log_r(n=1)
        e = math.e
        assert float(sym.phi(e, W1)) == pytest.approx(e, rel=1e-15)
        assert float(sym.phi_dr(e, W1)) == pytest.approx(2.0, rel=1e-15)
        assert float(sym.phi_drr(e, W1)) == pytest.approx(1.0 / e, rel=1e-15)

    def test_exponential_frozen_point(self):
        sym = dc.exponential(1.0, n=1)
        v = math.exp(3.0)
        assert float(sym.phi(3.0, W1)) == pytest.approx(v, rel=1e-15)
        assert float(sym.phi_dr(3.0, W1)) == pytest.approx(v, rel=1e-15)
        assert float(sym.phi_drr(3.0, W1)) == pytest.approx(v, rel=1e-15)

    def test_validity_radius_guard(self):
        sym = dc.homogeneous(2.0, n=1)
        with pytest.raises(DomainError):
            sym.phi(1.0, W1)

    def test_direction_shape_guard(self):
        sym = dc.homogeneous(2.0, n=2)
        with pytest.raises(InputError):
            sym.phi(10.0, np.array([1.0]))

    def test_homogeneous_sum_matches_manual_polynomial(self):
        sym = dc.homogeneous_sum(
            [(2.0, lambda w: 1.0, 1.0, 1.0),
             (1.0, lambda w: 0.25, 0.25, 0.25)], n=1)
        r = 7.0
        assert float(sym.phi(r, W1)) == pytest.approx(r**2 + 0.25 * r, rel=1e-14)
        assert float(sym.phi_dr(r, W1)) == pytest.approx(2 * r + 0.25, rel=1e-14)
        assert float(sym.phi_drr(r, W1)) == pytest.approx(2.0, rel=1e-14)

    def test_homogeneous_sum_rejects_zero_top_floor(self):
        with pytest.raises(InputError):
            dc.homogeneous_sum([(2.0, lambda w: 1.0, 0.0, 1.0)], n=1)

    def test_user_symbol_round_trip(self):
        sym = dc.user_symbol(
            lambda r, w: r**2, lambda r, w: 2.0 * r, lambda r, w: 2.0 + 0.0 * r,
            n=1, validity_radius=0.0, slope_floor_nondecreasing=True)
        assert float(sym.phi_dr(5.0, W1)) == 10.0
        report = dc.verify_growth_conditions(sym)
        assert report.supports("theorem1")


class TestDescriptions:
    def test_homogeneous_round_trip(self):
        desc = {"kind": "homogeneous", "a": 2.0, "n": 1, "validity_radius": 0.0}
        sym = dc.symbol_from_description(desc)
        assert sym.kind == "homogeneous"
        assert sym.describe() == desc

    def test_unknown_kind(self):
        with pytest.raises(InputError):
            dc.symbol_from_description({"kind": "fourier"})

    def test_unknown_field(self):
        with pytest.raises(InputError):
            dc.symbol_from_description({"kind": "rlogr", "order": 3})

    def test_missing_field(self):
        with pytest.raises(InputError):
            dc.symbol_from_description({"kind": "homogeneous"})


class TestGrowthChecker:
    def test_quadratic_supports_unbounded_slope(self):
        report = dc.verify_growth_conditions(dc.homogeneous(2.0, n=1, validity_radius=0.0))
        assert report.supports("theorem1")
        assert report.grows_unboundedly

    def test_linear_has_only_positive_floor_verdicts(self):
        report = dc.verify_growth_conditions(dc.homogeneous(1.0, n=1, validity_radius=0.0))
        assert not report.supports("theorem1")
        assert report.supports("theorem2-strong")
        # the width-hypothesis verdict needs a requested beta
        assert not report.supports("theorem2-weak")
        # |phi'| = 1 everywhere: the measured floor is exactly 1
        assert report.slope_floor == pytest.approx(1.0, rel=1e-12)

    def test_weak_verdict_carries_requested_beta(self):
        report = dc.verify_growth_conditions(
            dc.homogeneous(1.0, n=1, validity_radius=0.0), beta=1.0)
        assert report.beta == 1.0
        assert report.supports("theorem2-weak")

    def test_supports_unknown_variant_is_false(self):
        report = dc.verify_growth_conditions(dc.homogeneous(2.0, n=1, validity_radius=0.0))
        assert not report.supports("theorem3")

    def test_to_dict_real_fields_are_reprs(self):
        report = dc.verify_growth_conditions(dc.homogeneous(2.0, n=1, validity_radius=0.0))
        d = report.to_dict()
        assert d["verdicts"] == list(report.verdicts)
        assert float(d["slope_floor"]) == report.slope_floor
