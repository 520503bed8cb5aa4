"""Critical Sobolev membership: radial norm integrals and tail bounds."""

import math

import pytest

import divcert as dc
from divcert.errors import DomainError, InputError

SQRT2 = math.sqrt(2.0)

# 2 * integral_e^{e^4} r^{-2} (1+r^2)^{1/2} (log r)^{-3/2} dr,
# mpmath at 30 digits
HALF_NORM_SQ_REF = 2.0417210613268461


@pytest.fixture(scope="module")
def wide_annulus(single_annulus):
    # radii [e, e^4]: representable, but far enough out that the
    # critical integrand is already close to its pure power-law shape
    return single_annulus(dc.homogeneous(2.0, n=1, validity_radius=0.0),
                          1.0, 4)


class TestPartialNorm:
    def test_frozen_critical_value(self, wide_annulus):
        got = dc.hs_partial_norm(wide_annulus, 0.5, 1)
        assert got == pytest.approx(HALF_NORM_SQ_REF, rel=1e-10)

    def test_live_quadrature_oracle(self, wide_annulus):
        from scipy.integrate import quad

        def radial(r):
            return r**-2.0 * math.sqrt(1.0 + r * r) * math.log(r) ** -1.5

        oracle, _ = quad(radial, math.e, math.e**4, epsrel=1e-12)
        got = dc.hs_partial_norm(wide_annulus, 0.5, 1)
        assert got == pytest.approx(2.0 * oracle, rel=1e-8)

    def test_analytic_bracket(self, wide_annulus):
        # integral of u^{-3/2} over [1, 4] is exactly 1; the weight
        # correction multiplies by at most (1 + e^{-2})^{1/2}
        got = dc.hs_partial_norm(wide_annulus, 0.5, 1)
        assert 2.0 < got < 2.0 * math.sqrt(1.0 + math.exp(-2.0))

    def test_monotone_in_truncation(self, acceptance_schedule):
        vals = [dc.hs_partial_norm(acceptance_schedule, 0.5, j)
                for j in (1, 2, 3, 6)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_log_only_annuli_exact_at_critical_order(self, acceptance_schedule):
        # stage 2 exists only in log form; its closed-form mass is
        # 2 |S^0| (llog R_2^{-1/2} - llog R'_2^{-1/2}) up to the frozen
        # weight correction
        inc = (dc.hs_partial_norm(acceptance_schedule, 0.5, 2)
               - dc.hs_partial_norm(acceptance_schedule, 0.5, 1))
        llr, llrp = acceptance_schedule.llog_radii(2)
        expected = 4.0 * (math.exp(-llr / 2.0) - math.exp(-llrp / 2.0))
        assert inc == pytest.approx(expected, rel=1e-12)

    def test_supercritical_diverges(self, acceptance_schedule):
        assert dc.hs_partial_norm(acceptance_schedule, 0.75, 2) == math.inf

    def test_subcritical_tail_vanishes(self, acceptance_schedule):
        low = dc.hs_partial_norm(acceptance_schedule, 0.25, 1)
        assert dc.hs_partial_norm(acceptance_schedule, 0.25, 2) == low

    def test_input_guards(self, acceptance_schedule):
        with pytest.raises(DomainError):
            dc.hs_partial_norm(acceptance_schedule, -0.1, 1)
        with pytest.raises(InputError):
            dc.hs_partial_norm(acceptance_schedule, 0.5, 0)
        with pytest.raises(InputError):
            dc.hs_partial_norm(acceptance_schedule, 0.5, 219)


class TestTailBound:
    def test_frozen_values(self, wide_annulus, single_annulus):
        assert dc.hs_tail_bound(wide_annulus, 4.0) == pytest.approx(
            2.0 * SQRT2, rel=1e-14)
        two_d = single_annulus(dc.homogeneous(2.0, n=2, validity_radius=0.0),
                               1.0, 4)
        assert dc.hs_tail_bound(two_d, 4.0) == pytest.approx(
            4.0 * math.pi, rel=1e-14)

    def test_monotone_in_cut(self, wide_annulus):
        bounds = [dc.hs_tail_bound(wide_annulus, lr)
                  for lr in (4.0, 16.0, 256.0)]
        assert bounds[0] > bounds[1] > bounds[2] > 0.0

    def test_sharper_exponent_shrinks_it(self, wide_annulus):
        loose = dc.hs_tail_bound(wide_annulus, 100.0, rho=1.5)
        tight = dc.hs_tail_bound(wide_annulus, 100.0, rho=2.5)
        assert 0.0 < tight < loose

    def test_log_log_form_past_overflow(self, acceptance_schedule):
        lr, _ = acceptance_schedule.log_radii(218)
        llr, llrp = acceptance_schedule.llog_radii(218)
        assert math.isinf(lr)
        cut = dc.hs_tail_bound(acceptance_schedule, lr, from_radius_llog=llr)
        deeper = dc.hs_tail_bound(acceptance_schedule, lr, from_radius_llog=llrp)
        assert 0.0 < deeper < cut < 1e-100

    def test_bounds_the_actual_increments(self, acceptance_schedule):
        # each stage's mass sits above that stage's inner radius, so the
        # closed-form tail bound from there must dominate it
        report = dc.sobolev_report(acceptance_schedule)
        partials = report.partial_norms_squared
        for j in range(2, 219):
            inc = partials[j - 1] - partials[j - 2]
            lr, _ = acceptance_schedule.log_radii(j)
            llr, _ = acceptance_schedule.llog_radii(j)
            assert inc <= dc.hs_tail_bound(acceptance_schedule, lr,
                                           from_radius_llog=llr)

    def test_domain_guards(self, wide_annulus):
        with pytest.raises(DomainError):
            dc.hs_tail_bound(wide_annulus, 4.0, rho=1.0)
        with pytest.raises(DomainError):
            dc.hs_tail_bound(wide_annulus, 0.0)


class TestReport:
    def test_defaults_run_the_whole_schedule(self, acceptance_schedule):
        report = dc.sobolev_report(acceptance_schedule)
        assert report.s == 0.5
        assert report.j_max == 218
        assert len(report.partial_norms_squared) == 218
        assert report.tail_bound == 0.0
        assert report.converged
        assert report.norm == pytest.approx(math.sqrt(report.norm_squared))

    def test_partials_nondecreasing(self, acceptance_schedule):
        p = dc.sobolev_report(acceptance_schedule).partial_norms_squared
        assert all(b >= a for a, b in zip(p, p[1:]))
        assert p[0] > 0.0

    def test_truncated_report_bounds_the_rest(self, acceptance_schedule):
        early = dc.sobolev_report(acceptance_schedule, j_max=2)
        late = dc.sobolev_report(acceptance_schedule, j_max=5)
        assert not early.converged
        assert late.converged
        full = dc.sobolev_report(acceptance_schedule).norm_squared
        assert full - early.norm_squared <= early.tail_bound
        assert full - late.norm_squared <= late.tail_bound

    def test_tail_matches_closed_form(self, acceptance_schedule):
        report = dc.sobolev_report(acceptance_schedule, j_max=2, rho=1.5)
        lr, _ = acceptance_schedule.log_radii(3)
        llr, _ = acceptance_schedule.llog_radii(3)
        assert report.tail_bound == dc.hs_tail_bound(
            acceptance_schedule, lr, rho=1.5, from_radius_llog=llr)

    def test_dict_round_trips_floats(self, acceptance_schedule):
        report = dc.sobolev_report(acceptance_schedule, j_max=3)
        d = report.to_dict()
        assert d["j_max"] == 3
        assert float(d["s"]) == 0.5
        assert [float(v) for v in d["partial_norms_squared"]] == list(
            report.partial_norms_squared)
        assert float(d["norm"]) == report.norm

    def test_guards(self, acceptance_schedule):
        with pytest.raises(InputError):
            dc.sobolev_report(acceptance_schedule, j_max=0)
        with pytest.raises(DomainError):
            dc.sobolev_report(acceptance_schedule, s=-1.0)
