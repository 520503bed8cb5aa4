"""Lattice blocks, radius recursion, subsequences, serialization."""

import math
from dataclasses import replace

import numpy as np
import pytest

import divcert as dc
from divcert.errors import InputError, SizeError, ValidationError

LN2 = math.log(2.0)


class TestSpatialBlocks:
    def test_single_block_frozen(self):
        sched = dc.build_spatial_schedule(dc.identity_profile(), 1, 1)
        assert float(sched.delta[0]) == 0.5
        assert sched.points.tolist() == [[-0.5], [0.0], [0.5]]
        assert list(sched.block_bounds) == [3]
        # uniform grid strictly inside (1/3, 1/2) with end margin 1/16
        assert sched.times.tolist() == pytest.approx(
            [7.0 / 16.0, 5.0 / 12.0, 1.0 / 3.0 + 1.0 / 16.0], rel=1e-15)

    def test_two_blocks_frozen_counts(self):
        sched = dc.build_spatial_schedule(dc.identity_profile(), 1, 2)
        assert float(sched.delta[1]) == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert list(sched.block_bounds) == [3, 14]
        assert len(sched.points[sched.block_slice(2)]) == 11

    def test_quadratic_profile_frozen_count(self):
        sched = dc.build_spatial_schedule(dc.power_profile(2.0), 1, 1)
        assert float(sched.delta[0]) == 0.25
        assert sched.point_count == 7

    def test_acceptance_block_sizes(self, acceptance_schedule):
        bounds = list(acceptance_schedule.block_bounds)
        assert bounds == [3, 14, 37, 76, 135, 218]
        sizes = np.diff([0] + bounds).tolist()
        assert sizes == [3, 11, 23, 39, 59, 83]

    def test_times_globally_decreasing_within_intervals(self, acceptance_schedule):
        t = acceptance_schedule.times
        assert np.all(np.diff(t) < 0.0)
        for k in range(1, 7):
            blk = t[acceptance_schedule.block_slice(k)]
            assert np.all(blk > 1.0 / (k + 2.0))
            assert np.all(blk < 1.0 / (k + 1.0))

    def test_explicit_times_validated(self):
        with pytest.raises(InputError):
            dc.build_spatial_schedule(dc.identity_profile(), 1, 1,
                                      times=[0.6, 0.4, 0.35])
        with pytest.raises(InputError):
            dc.build_spatial_schedule(dc.identity_profile(), 1, 1,
                                      times=[0.45, 0.40])

    def test_oversized_first_block_raises(self):
        with pytest.raises(SizeError):
            dc.build_spatial_schedule(dc.scaled_profile(1e-7), 3, 1)

    def test_arrays_are_read_only(self, acceptance_schedule):
        with pytest.raises(ValueError):
            acceptance_schedule.times[0] = 1.0


class TestAnnulusRadii:
    def test_worked_example_radii(self):
        # three points at times 0.45, 0.40, 0.35 under the quadratic
        # symbol: separation needs 4/0.05 = 80, slope clearing needs
        # r > 10, both beaten by doubling, and the first radius sits at
        # the validity floor 2
        partial = dc.build_spatial_schedule(dc.identity_profile(), 1, 1,
                                            times=[0.45, 0.40, 0.35])
        sched = dc.build_annulus_schedule(
            dc.homogeneous(2.0, n=1, validity_radius=0.0), partial, N=4)
        assert float(sched.log_R[0]) == pytest.approx(LN2, rel=1e-14)
        assert float(sched.log_Rp[0]) == pytest.approx(4.0 * LN2, rel=1e-14)
        assert float(sched.log_R[1]) == pytest.approx(math.log(160.0), rel=1e-14)
        assert float(sched.log_R[2]) == pytest.approx(
            LN2 + 4.0 * math.log(160.0), rel=1e-14)

    def test_acceptance_radii_frozen(self, acceptance_schedule):
        lr = acceptance_schedule.log_R
        lrp = acceptance_schedule.log_Rp
        assert float(lr[0]) == pytest.approx(LN2, rel=1e-15)
        assert float(lrp[0]) == pytest.approx(81.0 * LN2, rel=1e-15)
        assert float(lr[1]) == pytest.approx(56.83806880591551, rel=1e-15)
        assert float(lr[2]) == pytest.approx(4604.576720459717, rel=1e-15)

    def test_radii_saturate_without_losing_log_log(self, acceptance_schedule):
        lrp = acceptance_schedule.log_Rp
        llrp = acceptance_schedule.llog_Rp
        assert not np.isfinite(lrp[-1])
        assert np.all(np.isfinite(llrp))
        assert np.all(np.diff(llrp) > 0.0)
        assert float(llrp[-1]) == pytest.approx(957.635825318008, rel=1e-13)

    def test_log_only_flag(self, acceptance_schedule):
        assert not acceptance_schedule.is_log_only(1)
        assert acceptance_schedule.is_log_only(2)

    def test_outer_equals_inner_to_the_N(self, acceptance_schedule):
        sched = acceptance_schedule
        for j in (1, 2, 3, 50):
            lr, lrp = sched.log_radii(j)
            if math.isfinite(lrp):
                assert lrp == pytest.approx(81.0 * lr, rel=1e-15)

    def test_requires_unbounded_slope_verdict(self):
        partial = dc.build_spatial_schedule(dc.identity_profile(), 1, 1)
        with pytest.raises(dc.ConstructionError):
            dc.build_annulus_schedule(
                dc.homogeneous(1.0, n=1, validity_radius=0.0), partial, N=4)

    def test_rejects_bad_exponent(self):
        partial = dc.build_spatial_schedule(dc.identity_profile(), 1, 1)
        sym = dc.homogeneous(2.0, n=1, validity_radius=0.0)
        with pytest.raises(InputError):
            dc.build_annulus_schedule(sym, partial, N=1)
        with pytest.raises(InputError):
            dc.build_annulus_schedule(sym, partial, N=2.5)


class TestTangentialSubsequence:
    def test_origin_picks_lattice_origin_in_every_block(self, acceptance_schedule):
        idx = dc.build_tangential_subsequence([0.0], acceptance_schedule)
        assert len(idx) == 6
        t_prev = math.inf
        for i in idx:
            pt = acceptance_schedule.scheduled_point(i)
            t = acceptance_schedule.scheduled_time(i)
            assert float(np.abs(pt).max()) == 0.0
            assert t < t_prev
            t_prev = t

    def test_off_origin_target_stays_within_profile_width(self):
        sched = dc.build_spatial_schedule(dc.identity_profile(), 1, 2)
        idx = dc.build_tangential_subsequence([0.3], sched)
        for i in idx:
            pt = sched.scheduled_point(i)
            t = sched.scheduled_time(i)
            assert abs(float(pt[0]) - 0.3) < t

    def test_target_outside_ball_rejected(self, acceptance_schedule):
        with pytest.raises(InputError):
            dc.build_tangential_subsequence([7.0], acceptance_schedule)


class TestTheorem2Schedules:
    def test_strong_frozen_selection(self, theorem2_strong_schedule):
        sched = theorem2_strong_schedule
        assert list(sched.p_indices) == [8, 2272, 190528]
        assert sched.h == 1.0
        assert sched.eta_scale == 0.25

    def test_spacing_and_width_conditions(self, theorem2_strong_schedule):
        sched = theorem2_strong_schedule
        taken = [sched.annulus_target(j) for j in range(1, sched.annulus_count + 1)]
        for j, (pt, t) in enumerate(taken, start=1):
            assert float(np.abs(pt).max()) < sched.eta(t)
            if j < len(taken):
                gap = t - taken[j][1]
                assert gap >= (3.0 / sched.h) * sched.eta(t) * (1.0 - 1e-12)

    def test_weak_radius_rule(self, theorem2_weak_schedule):
        sched = theorem2_weak_schedule
        assert sched.log_radii(1)[0] == math.log(2.0)
        for j in range(2, sched.annulus_count + 1):
            _, t = sched.annulus_target(j)
            lr, _ = sched.log_radii(j)
            _, lrp_prev = sched.log_radii(j - 1)
            # identity profile: 1/t and 1/gamma(t) coincide, and beta = 1
            assert lr > (j + 2) * LN2 - math.log(t)
            assert lr >= LN2 + lrp_prev

    def test_strong_radius_rule(self, theorem2_strong_schedule):
        sched = theorem2_strong_schedule
        times = [sched.annulus_target(j)[1] for j in range(1, sched.annulus_count + 1)]
        assert sched.log_radii(1)[0] == math.log(2.0)
        for j in range(2, len(times) + 1):
            gap = times[j - 2] - times[j - 1]
            lr, _ = sched.log_radii(j)
            _, lrp_prev = sched.log_radii(j - 1)
            assert lr > j * LN2 - math.log(gap)
            assert lr >= LN2 + lrp_prev

    def test_weak_needs_beta(self):
        sym = dc.homogeneous(1.0, n=1, validity_radius=0.0)
        with pytest.raises(InputError):
            dc.build_theorem2_schedule(sym, [0.0], dc.identity_profile(), 1, 10,
                                       N=81, variant="theorem2-weak")

    def test_eta_accessor_absent_on_theorem1(self, acceptance_schedule):
        with pytest.raises(InputError):
            acceptance_schedule.eta(0.3)


class TestValidation:
    def test_acceptance_schedule_validates(self, acceptance_schedule):
        dc.validate_schedule(acceptance_schedule)

    def test_detects_time_disorder(self, acceptance_schedule):
        t = np.array(acceptance_schedule.times)
        t[4], t[5] = t[5], t[4]
        with pytest.raises(ValidationError):
            dc.validate_schedule(replace(acceptance_schedule, times=t))

    def test_detects_radius_exponent_drift(self, acceptance_schedule):
        lrp = np.array(acceptance_schedule.log_Rp)
        lrp[0] += 0.1
        with pytest.raises(ValidationError):
            dc.validate_schedule(replace(acceptance_schedule, log_Rp=lrp))

    def test_detects_nesting_violation(self, acceptance_schedule):
        lr = np.array(acceptance_schedule.log_R)
        lr[1] = float(acceptance_schedule.log_Rp[0])
        with pytest.raises(ValidationError):
            dc.validate_schedule(replace(acceptance_schedule, log_R=lr))


class TestSerialization:
    def test_round_trip_theorem1(self, acceptance_schedule, tmp_path):
        path = tmp_path / "sched.json"
        dc.save_schedule(acceptance_schedule, path)
        back = dc.load_schedule(path)
        for name in ("delta", "points", "times", "log_R", "log_Rp",
                     "llog_R", "llog_Rp"):
            a = getattr(acceptance_schedule, name)
            b = getattr(back, name)
            assert np.array_equal(np.asarray(a), np.asarray(b))
        assert back.N == 81
        assert back.symbol.kind == "homogeneous"

    def test_round_trip_theorem2(self, theorem2_weak_schedule, tmp_path):
        path = tmp_path / "weak.json"
        dc.save_schedule(theorem2_weak_schedule, path)
        back = dc.load_schedule(path)
        assert list(back.p_indices) == list(theorem2_weak_schedule.p_indices)
        assert back.beta == 1.0
        assert back.h == 1.0
        assert back.variant == "theorem2-weak"

    def test_load_validates_by_default(self, acceptance_schedule, tmp_path):
        import json

        path = tmp_path / "sched.json"
        dc.save_schedule(acceptance_schedule, path)
        doc = json.loads(path.read_text())
        doc["times"][4], doc["times"][5] = doc["times"][5], doc["times"][4]
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError):
            dc.load_schedule(path)
        assert dc.load_schedule(path, validate=False).point_count == 218
