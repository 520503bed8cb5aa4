"""Divergence schedules: lattice points tangentially approaching every
target, paired decreasing times, and frequency annuli with certified
separation.

A schedule is the whole scaffold on which the counterexample datum and its
certificates are built:

  * K blocks of lattice points, block k being the ball of radius k
    intersected with a mesh delta_k Z^n where delta_k shrinks with the
    approach-profile width. Every point x with |x| <= K - 1 then has, in
    each late-enough block, a lattice point within profile(t) of it.
  * One time per point, strictly decreasing, block k's times confined to
    the open interval (1/(k+2), 1/(k+1)).
  * For full schedules, one frequency annulus (R_j, R_j^N) per scheduled
    point (or per selected subsequence element in the positive-slope-floor
    variants), with radii growing so fast that only their logarithms, and
    eventually only the logarithms of those, are representable.

Radii are therefore stored as log_R / log_Rp together with llog_R /
llog_Rp (logs of the logs). Downstream certificate arithmetic uses
whichever level is still finite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import (ConstructionError, DomainError, InputError,
                     InternalError, SizeError, ValidationError)
from .ioutil import atomic_write_text
from .symbol import DispersionSymbol, symbol_from_description, verify_growth_conditions

LN2 = math.log(2.0)

# log R above this means exp(log R) overflows binary64 and the annulus is
# usable only through log-domain enclosures
LOG_REPRESENTABLE = 709.0

# relative exclusion band at the open ball boundary; a lattice multiple
# whose rounded norm lands within this band of the radius is treated as a
# boundary point and excluded. Keeps counts stable when k/delta is a
# resolvable fraction (6 * float(1/3) rounds to 1.9999999999999998).
BOUNDARY_EXCLUSION = 1e-9

SCHEDULE_FORMAT = "divcert.schedule/1"

_PROFILE_PROBE = tuple(10.0 ** (-e) for e in range(1, 9))


@dataclass(frozen=True)
class ApproachProfile:
    """Width profile of the approach region: strictly increasing with
    profile(0+) = 0, evaluated on times in (0, 1].

    kinds: "identity", "power" (t**sigma), "scaled" (c*t). Construction
    probes t in {1e-1, ..., 1e-8} for strict monotonicity and smallness
    near zero; a profile passing the probe can still misbehave between
    probe points, which is the caller's responsibility for exotic
    parameters.
    """

    kind: str
    sigma: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in ("identity", "power", "scaled"):
            raise InputError(f"unknown profile kind {self.kind!r}")
        if self.kind == "power" and not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise InputError(f"power profile needs sigma > 0, got {self.sigma}")
        if self.kind == "scaled" and not (self.c > 0.0 and math.isfinite(self.c)):
            raise InputError(f"scaled profile needs c > 0, got {self.c}")
        vals = [float(self(t)) for t in _PROFILE_PROBE]
        if not all(a > b for a, b in zip(vals, vals[1:])):
            raise InputError(f"profile is not strictly increasing on the probe grid: {vals}")
        if not (vals[-1] < 1e-3):
            raise InputError(f"profile({_PROFILE_PROBE[-1]}) = {vals[-1]} is not < 1e-3")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if t.size and not (float(np.min(t)) > 0.0):
            raise DomainError(f"profile evaluated at nonpositive time {float(np.min(t))!r}")
        if t.size and float(np.max(t)) > 1.0:
            raise DomainError(f"profile evaluated outside (0, 1]: {float(np.max(t))!r}")
        if self.kind == "identity":
            out = t
        elif self.kind == "power":
            out = t**self.sigma
        else:
            out = self.c * t
        return out if out.shape else float(out)

    def describe(self):
        d = {"kind": self.kind}
        if self.kind == "power":
            d["sigma"] = self.sigma
        elif self.kind == "scaled":
            d["c"] = self.c
        return d


@dataclass(frozen=True)
class TruncatedProfile:
    """scale * min(base(t), t): the narrowed width used when a symbol's
    slope floor h forces the lattice to hug its targets more tightly.
    Not a user-facing kind; produced by the variant builders."""

    base: ApproachProfile
    scale: float
    kind: str = "eta"

    def __post_init__(self):
        if not (0.0 < self.scale <= 1.0):
            raise InputError(f"truncated profile needs scale in (0, 1], got {self.scale}")

    def __call__(self, t):
        base = np.asarray(self.base(t), dtype=float)
        t = np.asarray(t, dtype=float)
        out = self.scale * np.minimum(base, t)
        return out if out.shape else float(out)

    def describe(self):
        return {"kind": "eta", "scale": self.scale, "base": self.base.describe()}


def identity_profile():
    return ApproachProfile("identity")


def power_profile(sigma):
    return ApproachProfile("power", sigma=float(sigma))


def scaled_profile(c):
    return ApproachProfile("scaled", c=float(c))


def profile_from_description(desc):
    if not isinstance(desc, dict) or "kind" not in desc:
        raise InputError(f"not a profile description: {desc!r}")
    d = dict(desc)
    kind = d.pop("kind")
    if kind == "identity":
        prof = ApproachProfile("identity")
    elif kind == "power":
        prof = ApproachProfile("power", sigma=float(d.pop("sigma")))
    elif kind == "scaled":
        prof = ApproachProfile("scaled", c=float(d.pop("c")))
    elif kind == "eta":
        prof = TruncatedProfile(base=profile_from_description(d.pop("base")),
                                scale=float(d.pop("scale")))
    else:
        raise InputError(f"unknown profile kind {kind!r}")
    if d:
        raise InputError(f"unknown profile fields {sorted(d)}")
    return prof


@dataclass(frozen=True, eq=False)
class Schedule:
    """Immutable schedule scaffold. Arrays are read-only.

    points/times cover all K blocks; block_bounds[k-1] is the cumulative
    point count through block k (1-based everywhere in the public API).
    Annulus fields are None for partial (spatial-only) schedules. For the
    positive-floor variants, p_indices maps annulus j to the scheduled
    point it was built against; otherwise annulus j belongs to point j.
    """

    variant: str
    n: int
    K: int
    profile: object
    lattice_profile: object
    delta: np.ndarray
    points: np.ndarray
    times: np.ndarray
    block_bounds: np.ndarray
    N: Optional[int] = None
    symbol: Optional[DispersionSymbol] = None
    log_R: Optional[np.ndarray] = None
    log_Rp: Optional[np.ndarray] = None
    llog_R: Optional[np.ndarray] = None
    llog_Rp: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    h: Optional[float] = None
    eta_scale: Optional[float] = None
    beta: Optional[float] = None
    p_indices: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("delta", "points", "times", "block_bounds", "log_R",
                     "log_Rp", "llog_R", "llog_Rp", "center", "p_indices"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.ascontiguousarray(arr)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    # -- sizes -----------------------------------------------------------

    @property
    def point_count(self):
        return int(self.block_bounds[-1])

    @property
    def has_annuli(self):
        return self.log_R is not None

    @property
    def annulus_count(self):
        return 0 if self.log_R is None else len(self.log_R)

    # -- 1-based accessors ----------------------------------------------

    def block_slice(self, k):
        if not (1 <= k <= self.K):
            raise InputError(f"block index {k} outside 1..{self.K}")
        lo = 0 if k == 1 else int(self.block_bounds[k - 2])
        return slice(lo, int(self.block_bounds[k - 1]))

    def scheduled_point(self, k):
        if not (1 <= k <= self.point_count):
            raise InputError(f"point index {k} outside 1..{self.point_count}")
        return np.array(self.points[k - 1])

    def scheduled_time(self, k):
        if not (1 <= k <= self.point_count):
            raise InputError(f"point index {k} outside 1..{self.point_count}")
        return float(self.times[k - 1])

    def annulus_scheduled_index(self, j):
        """1-based index of the scheduled point annulus j was built
        against."""
        if not (1 <= j <= self.annulus_count):
            raise InputError(f"annulus index {j} outside 1..{self.annulus_count}")
        if self.p_indices is not None:
            return int(self.p_indices[j - 1])
        return int(j)

    def annulus_target(self, j):
        idx = self.annulus_scheduled_index(j)
        return self.scheduled_point(idx), self.scheduled_time(idx)

    def log_radii(self, j):
        if not self.has_annuli:
            raise InputError("schedule has no annuli")
        if not (1 <= j <= self.annulus_count):
            raise InputError(f"annulus index {j} outside 1..{self.annulus_count}")
        return float(self.log_R[j - 1]), float(self.log_Rp[j - 1])

    def llog_radii(self, j):
        if not self.has_annuli:
            raise InputError("schedule has no annuli")
        if not (1 <= j <= self.annulus_count):
            raise InputError(f"annulus index {j} outside 1..{self.annulus_count}")
        return float(self.llog_R[j - 1]), float(self.llog_Rp[j - 1])

    def is_log_only(self, j):
        """True when the annulus radii cannot be exponentiated in
        binary64, so only log-domain enclosures apply."""
        _, lrp = self.log_radii(j)
        return not (lrp <= LOG_REPRESENTABLE)

    def eta(self, t):
        if self.eta_scale is None:
            raise InputError(f"{self.variant} schedule has no narrowed width")
        return self.lattice_profile(t)


# -- lattice enumeration -------------------------------------------------


def _enumerate_block(k, delta, n):
    """Integer multiples of delta inside the open ball of radius k, in
    ascending lexicographic coordinate order."""
    if not (delta > 0.0):
        raise InternalError(f"block {k} has nonpositive mesh {delta!r}")
    M = int(math.floor(k / delta)) + 1
    count_est = (2 * M + 1) ** n
    if count_est > 2**62:
        raise SizeError(f"block {k} would enumerate about {count_est:.3e} mesh points")
    axis = np.arange(-M, M + 1, dtype=np.int64)
    if n == 1:
        m = axis[:, None]
    elif count_est <= 4_000_000:
        grids = np.meshgrid(*([axis] * n), indexing="ij")
        m = np.column_stack([g.ravel() for g in grids])
    else:
        # walk the first coordinate in slices to keep memory flat
        chunks = []
        tail_grids = np.meshgrid(*([axis] * (n - 1)), indexing="ij")
        tail = np.column_stack([g.ravel() for g in tail_grids])
        tail_norm2 = (tail.astype(float) ** 2).sum(axis=1)
        limit2 = (k * (1.0 - BOUNDARY_EXCLUSION) / delta) ** 2
        for i0 in axis:
            keep = float(i0) ** 2 + tail_norm2 < limit2
            if keep.any():
                rows = np.column_stack([np.full(int(keep.sum()), i0, dtype=np.int64),
                                        tail[keep]])
                chunks.append(rows)
        m = np.concatenate(chunks, axis=0) if chunks else np.empty((0, n), dtype=np.int64)
    if n == 1 or count_est <= 4_000_000:
        norms = delta * np.sqrt((m.astype(float) ** 2).sum(axis=1))
        m = m[norms < k * (1.0 - BOUNDARY_EXCLUSION)]
    if len(m) == 0:
        raise InternalError(f"block {k} enumerated no lattice points (mesh {delta!r})")
    order = np.lexsort(tuple(m[:, c] for c in range(n - 1, -1, -1)))
    return delta * m[order].astype(float)


def _default_block_times(k, size):
    lo = 1.0 / (k + 2.0)
    hi = 1.0 / (k + 1.0)
    margin = 1.0 / (4.0 * size + 4.0)
    if 2.0 * margin >= hi - lo:
        # the absolute margin does not fit this narrow interval; fall back
        # to a quarter-width margin so the grid stays strictly inside
        margin = (hi - lo) / 4.0
    return np.linspace(hi - margin, lo + margin, size)


def build_spatial_schedule(profile, n, K, times=None):
    """Blocks of lattice points with paired strictly decreasing times.

    times=None lays a uniform grid inside each block's open interval with
    an end margin of 1/(4*block_size+4); an explicit sequence of length
    equal to the total point count is validated against the same interval
    and monotonicity constraints.
    """
    if n not in (1, 2, 3):
        raise InputError(f"dimension must be 1, 2 or 3, got {n}")
    if not (isinstance(K, (int, np.integer)) and K >= 1):
        raise InputError(f"block count must be a positive integer, got {K!r}")
    K = int(K)

    delta = np.empty(K)
    blocks = []
    bounds = np.empty(K, dtype=np.int64)
    total = 0
    for k in range(1, K + 1):
        delta[k - 1] = float(profile(1.0 / (k + 1.0))) / math.sqrt(n)
        pts = _enumerate_block(k, delta[k - 1], n)
        blocks.append(pts)
        total += len(pts)
        bounds[k - 1] = total
    points = np.concatenate(blocks, axis=0)

    if times is None:
        parts = [_default_block_times(k, len(blocks[k - 1])) for k in range(1, K + 1)]
        t = np.concatenate(parts)
    else:
        t = np.asarray(times, dtype=float)
        if t.shape != (total,):
            raise InputError(f"need {total} times, got shape {t.shape}")
        for k in range(1, K + 1):
            lo = 0 if k == 1 else int(bounds[k - 2])
            blk = t[lo:int(bounds[k - 1])]
            if not (np.all(blk > 1.0 / (k + 2.0)) and np.all(blk < 1.0 / (k + 1.0))):
                raise InputError(f"times for block {k} leave the open interval "
                                 f"(1/{k + 2}, 1/{k + 1})")
    if not np.all(np.diff(t) < 0.0):
        raise InternalError("assembled times are not strictly decreasing")

    return Schedule(
        variant="theorem1",
        n=n,
        K=K,
        profile=profile,
        lattice_profile=profile,
        delta=delta,
        points=points,
        times=t,
        block_bounds=bounds,
    )


# -- radii ---------------------------------------------------------------


def _llog_of(log_value, llog_prev_rp):
    """log(log R) when log R itself may have overflowed. In the overflow
    case the previous log R' dominates the max by hundreds of orders, so
    log R = log2 + log R'_{prev} up to that level and the correction
    log1p(log2 / log R'_{prev}) underflows harmlessly."""
    if math.isfinite(log_value):
        return math.log(log_value)
    return llog_prev_rp + math.log1p(LN2 * math.exp(-min(llog_prev_rp, 700.0)))


def _pair_ratio_threshold(points, times, j):
    """max over l < j of |x_l - x_j| / (t_l - t_j), plus the argmax l
    (1-based), for the slope-clearing condition. 0-based j here."""
    dx = np.sqrt(((points[:j] - points[j]) ** 2).sum(axis=1))
    dt = times[:j] - times[j]
    ratios = dx / dt
    l = int(np.argmax(ratios))
    return float(ratios[l]), l + 1


def build_annulus_schedule(sym, partial, N=16):
    """Attach one frequency annulus (R_j, R_j^N) to every scheduled point.

    Radii take exactly twice the largest applicable lower bound: the
    separation bound 2^j / min_gap, the slope-clearing radius for the
    worst pair ratio, and the previous outer radius. The first radius is
    max(2 + validity_radius, radius where the slope floor clears 1).
    """
    if not isinstance(partial, Schedule):
        raise InputError("partial schedule expected")
    if sym.n != partial.n:
        raise InputError(f"symbol dimension {sym.n} does not match schedule {partial.n}")
    if not (isinstance(N, (int, np.integer)) and N >= 2):
        raise InputError(f"radius exponent must be an integer >= 2, got {N!r}")
    N = int(N)

    report = verify_growth_conditions(sym)
    if not report.supports("theorem1"):
        raise ConstructionError(
            f"symbol earned verdicts {report.verdicts}, needs the unbounded-"
            f"slope verdict for this construction"
        )

    J = partial.point_count
    times = partial.times
    points = partial.points

    log_R = np.empty(J)
    log_Rp = np.empty(J)
    llog_R = np.empty(J)
    llog_Rp = np.empty(J)

    clear1 = sym.clearing_log_radius(0.0)
    if not math.isfinite(clear1):
        raise ConstructionError("slope floor never clears 1 below overflow")
    log_R[0] = max(math.log(2.0 + sym.validity_radius), clear1)
    llog_R[0] = math.log(log_R[0])
    log_Rp[0] = N * log_R[0]
    llog_Rp[0] = math.log(N) + llog_R[0]

    logN = math.log(N)
    for j in range(1, J):
        gap = float(times[j - 1] - times[j])  # min over l<j since times decrease
        b_sep = (j + 1) * LN2 - math.log(gap)
        ratio, l_worst = _pair_ratio_threshold(points, times, j)
        if ratio > 0.0:
            b_clear = sym.clearing_log_radius(LN2 + math.log(ratio))
            if not math.isfinite(b_clear):
                raise ConstructionError(
                    f"slope floor never clears the pair threshold below "
                    f"overflow at annulus j={j + 1} (worst pair l={l_worst})"
                )
        else:
            b_clear = -math.inf
        # plain float arithmetic so the inevitable overflow saturates to
        # inf quietly; the llog level keeps the real magnitudes
        log_R[j] = LN2 + max(b_sep, b_clear, float(log_Rp[j - 1]))
        llog_R[j] = _llog_of(float(log_R[j]), float(llog_Rp[j - 1]))
        log_Rp[j] = N * float(log_R[j])
        llog_Rp[j] = logN + float(llog_R[j])

    return replace(partial, symbol=sym, N=N, log_R=log_R, log_Rp=log_Rp,
                   llog_R=llog_R, llog_Rp=llog_Rp)


def build_tangential_subsequence(x, sched, profile=None):
    """One scheduled index per admissible block, each within the lattice
    width of x, times decreasing to zero. Returns 1-based indices."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sched.n,):
        raise InputError(f"target has shape {x.shape}, expected ({sched.n},)")
    norm = float(np.sqrt((x**2).sum()))
    if norm > sched.K - 1:
        raise InputError(f"|x| = {norm!r} exceeds K - 1 = {sched.K - 1}")
    if profile is None:
        profile = sched.lattice_profile

    k0 = max(1, int(math.ceil(norm)))
    chosen = []
    for k in range(k0, sched.K + 1):
        sl = sched.block_slice(k)
        pts = sched.points[sl]
        ts = sched.times[sl]
        dist = np.sqrt(((pts - x) ** 2).sum(axis=1))
        width = np.asarray(profile(ts), dtype=float)
        ok = np.nonzero(dist < width)[0]
        if len(ok) == 0:
            raise InternalError(
                f"no lattice point within the approach width in block {k}; "
                f"the density guarantee is violated"
            )
        best = ok[int(np.argmin(dist[ok]))]
        chosen.append(sl.start + int(best) + 1)
    return np.asarray(chosen, dtype=np.int64)


def build_theorem2_schedule(sym, x, profile, n, K, N=16, variant="theorem2-strong",
                            beta=None, r_max=1e6):
    """Schedule for symbols with a positive slope floor h but possibly
    bounded slope.

    The lattice is built against the narrowed width min(h/4,1)*min(g,id)
    of the requested profile g, a subsequence of the tangential indices
    for x is thinned greedily until consecutive times are at least
    (3/h) * width apart, and annuli are attached to the surviving indices
    only. The weak variant sizes radii from the power-weighted curvature
    condition at exponent beta instead of pair separations.
    """
    if variant not in ("theorem2-strong", "theorem2-weak"):
        raise InputError(f"unknown variant {variant!r}")
    if variant == "theorem2-weak":
        if beta is None or not (beta > 0.0):
            raise InputError(f"weak variant needs beta > 0, got {beta!r}")
        beta = float(beta)
    else:
        beta = None
    if not (isinstance(N, (int, np.integer)) and N >= 2):
        raise InputError(f"radius exponent must be an integer >= 2, got {N!r}")
    N = int(N)

    report = verify_growth_conditions(sym, r_max=r_max, beta=beta)
    if report.slope_floor <= 0.0:
        raise ConstructionError("symbol has no positive slope floor on the grid")
    if not report.supports(variant):
        raise ConstructionError(
            f"symbol earned verdicts {report.verdicts}, not {variant!r}"
        )
    h = report.slope_floor
    eta_scale = min(h / 4.0, 1.0)
    eta = TruncatedProfile(base=profile, scale=eta_scale)

    partial = build_spatial_schedule(eta, n, K)
    x = np.asarray(x, dtype=float)
    seq = build_tangential_subsequence(x, partial)

    chosen = [int(seq[0])]
    for idx in seq[1:]:
        t_prev = partial.scheduled_time(chosen[-1])
        if t_prev - partial.scheduled_time(int(idx)) >= (3.0 / h) * eta(t_prev):
            chosen.append(int(idx))
    p = np.asarray(chosen, dtype=np.int64)
    J = len(p)

    log_R = np.empty(J)
    log_Rp = np.empty(J)
    llog_R = np.empty(J)
    llog_Rp = np.empty(J)
    log_R[0] = math.log(2.0 + sym.validity_radius)
    llog_R[0] = math.log(log_R[0])
    log_Rp[0] = N * log_R[0]
    llog_Rp[0] = math.log(N) + llog_R[0]
    logN = math.log(N)
    t_sel = partial.times[p - 1]
    for j in range(1, J):
        if variant == "theorem2-strong":
            gap = float(t_sel[j - 1] - t_sel[j])
            b = (j + 1) * LN2 - math.log(gap)
        else:
            t_j = float(t_sel[j])
            inv = max(-math.log(t_j), -math.log(float(profile(t_j))))
            b = ((j + 3) * LN2 + inv) / beta
        log_R[j] = LN2 + max(b, float(log_Rp[j - 1]))
        llog_R[j] = _llog_of(float(log_R[j]), float(llog_Rp[j - 1]))
        log_Rp[j] = N * float(log_R[j])
        llog_Rp[j] = logN + float(llog_R[j])

    return replace(partial, variant=variant, profile=profile, symbol=sym, N=N,
                   log_R=log_R, log_Rp=log_Rp, llog_R=llog_R, llog_Rp=llog_Rp,
                   center=x, h=h, eta_scale=eta_scale, beta=beta, p_indices=p)


# -- validation ----------------------------------------------------------


def _fail(msg):
    raise ValidationError(msg)


def validate_schedule(sched):
    """Independent invariant sweep over raw fields. Separate code path
    from construction on purpose: everything here is re-derived, not
    trusted."""
    if sched.n not in (1, 2, 3):
        _fail(f"dimension {sched.n} outside 1..3")
    if sched.K < 1:
        _fail(f"block count {sched.K} < 1")
    if sched.variant not in ("theorem1", "theorem2-strong", "theorem2-weak"):
        _fail(f"unknown variant {sched.variant!r}")

    bounds = sched.block_bounds
    if len(bounds) != sched.K or not np.all(np.diff(bounds) > 0) or bounds[0] < 1:
        _fail(f"block bounds not strictly increasing positive: {bounds}")
    total = int(bounds[-1])
    if sched.points.shape != (total, sched.n):
        _fail(f"points shape {sched.points.shape} vs expected ({total}, {sched.n})")
    if sched.times.shape != (total,):
        _fail(f"times shape {sched.times.shape} vs expected ({total},)")

    # lattice: deltas from the profile, blocks re-enumerated exactly
    for k in range(1, sched.K + 1):
        want = float(sched.lattice_profile(1.0 / (k + 1.0))) / math.sqrt(sched.n)
        if sched.delta[k - 1] != want:
            _fail(f"delta[{k}] = {sched.delta[k - 1]!r} differs from profile value {want!r}")
        pts = _enumerate_block(k, want, sched.n)
        if not np.array_equal(pts, sched.points[sched.block_slice(k)]):
            _fail(f"block {k} points differ from lattice enumeration")
    if not np.all(np.diff(sched.delta) < 0.0):
        _fail(f"mesh sizes not strictly decreasing: {sched.delta}")

    # times inside each block interval, globally strictly decreasing
    for k in range(1, sched.K + 1):
        blk = sched.times[sched.block_slice(k)]
        if not (np.all(blk > 1.0 / (k + 2.0)) and np.all(blk < 1.0 / (k + 1.0))):
            _fail(f"block {k} times leave (1/{k + 2}, 1/{k + 1})")
    if not np.all(np.diff(sched.times) < 0.0):
        _fail("times not strictly decreasing")

    if not sched.has_annuli:
        return

    sym = sched.symbol
    if sym is None:
        _fail("annuli present but symbol missing")
    if sym.n != sched.n:
        _fail(f"symbol dimension {sym.n} vs schedule {sched.n}")
    if sched.N is None or sched.N < 2:
        _fail(f"radius exponent {sched.N!r} invalid")

    J = sched.annulus_count
    expected_J = total if sched.p_indices is None else len(sched.p_indices)
    if J != expected_J:
        _fail(f"{J} annuli for {expected_J} targets")
    for arr, name in ((sched.log_Rp, "log_Rp"), (sched.llog_R, "llog_R"),
                      (sched.llog_Rp, "llog_Rp")):
        if arr is None or len(arr) != J:
            _fail(f"{name} missing or wrong length")

    lr, lrp = sched.log_R, sched.log_Rp
    llr, llrp = sched.llog_R, sched.llog_Rp
    if not lr[0] >= math.log(2.0 + sym.validity_radius):
        _fail(f"first radius log {lr[0]!r} below log(2 + validity radius)")
    for j in range(J):
        if math.isfinite(lr[j]):
            if float(lrp[j]) != sched.N * float(lr[j]):
                _fail(f"log_Rp[{j + 1}] != N * log_R[{j + 1}]")
            if llr[j] != math.log(lr[j]):
                _fail(f"llog_R[{j + 1}] inconsistent with log_R")
        if not (math.isfinite(llr[j]) and math.isfinite(llrp[j])):
            _fail(f"llog radii not finite at annulus {j + 1}")
        if not llrp[j] > llr[j]:
            _fail(f"annulus {j + 1} not widening (llog_Rp <= llog_R)")
        if j + 1 < J:
            # the true gap is a factor >= 2 in radius, but adding log 2
            # saturates once it drops under one ulp of log R'; compare at
            # whichever level still resolves, non-strictly past saturation
            if math.isfinite(lr[j + 1]):
                if not lr[j + 1] >= LN2 + lrp[j]:
                    _fail(f"annulus {j + 2} does not clear the previous outer radius")
            elif not llr[j + 1] >= llrp[j]:
                _fail(f"annulus {j + 2} does not clear the previous outer radius")

    times = sched.times
    points = sched.points
    if sched.variant == "theorem1":
        if sched.p_indices is not None:
            _fail("subsequence indices on an unbounded-slope schedule")
        for j in range(1, J):
            if not math.isfinite(lr[j]):
                continue  # nesting already checked at llog level
            gap = float(times[j - 1] - times[j])
            if not lr[j] > (j + 1) * LN2 - math.log(gap):
                _fail(f"annulus {j + 1} radius below the separation bound")
            ratio, _ = _pair_ratio_threshold(points, times, j)
            if ratio > 0.0:
                floor = annulus_slope_floor_log(sym, float(lr[j]), float(lrp[j]))
                if not floor > LN2 + math.log(ratio):
                    _fail(f"slope floor does not clear the pair threshold at annulus {j + 1}")
    else:
        if sched.p_indices is None or sched.center is None or sched.h is None:
            _fail("positive-floor schedule missing center, h or subsequence")
        if not (sched.h > 0.0):
            _fail(f"slope floor h = {sched.h!r} not positive")
        if sched.eta_scale != min(sched.h / 4.0, 1.0):
            _fail("narrowing scale inconsistent with h")
        p = sched.p_indices
        if not np.all(np.diff(p) > 0) or p[0] < 1 or p[-1] > total:
            _fail(f"subsequence indices invalid: {p}")
        t_sel = times[p - 1]
        for j in range(J):
            d = float(np.sqrt(((points[p[j] - 1] - sched.center) ** 2).sum()))
            if not d < sched.eta(float(t_sel[j])):
                _fail(f"subsequence point {j + 1} outside the narrowed width")
        for j in range(J - 1):
            need = (3.0 / sched.h) * sched.eta(float(t_sel[j]))
            if not float(t_sel[j] - t_sel[j + 1]) >= need:
                _fail(f"subsequence spacing violated between elements {j + 1}, {j + 2}")
        if sched.variant == "theorem2-weak":
            if sched.beta is None or not (sched.beta > 0.0):
                _fail(f"weak variant needs beta > 0, got {sched.beta!r}")
            for j in range(1, J):
                if not math.isfinite(lr[j]):
                    continue
                t_j = float(t_sel[j])
                inv = max(-math.log(t_j), -math.log(float(sched.profile(t_j))))
                if not lr[j] > ((j + 3) * LN2 + inv) / sched.beta:
                    _fail(f"annulus {j + 1} radius below the weak bound")
        else:
            for j in range(1, J):
                if not math.isfinite(lr[j]):
                    continue
                gap = float(t_sel[j - 1] - t_sel[j])
                if not lr[j] > (j + 1) * LN2 - math.log(gap):
                    _fail(f"annulus {j + 1} radius below the separation bound")


def annulus_slope_floor_log(sym, s_lo, s_hi, grid_points=256):
    """log of a lower bound for inf over the annulus and all directions of
    |phi'|. Monotone floors reduce to the inner endpoint; otherwise a grid
    minimum over representable radii (approximate, and unavailable in the
    log-only regime)."""
    if sym.slope_floor_nondecreasing:
        return sym.log_slope_floor(s_lo)
    if s_hi > LOG_REPRESENTABLE:
        raise InputError(
            "non-monotone slope floor cannot be bounded on a log-only annulus"
        )
    from .symbol import angular_grid

    grid = np.linspace(s_lo, s_hi, grid_points)
    dirs, _ = angular_grid(sym.n)
    return min(sym.log_slope_at(float(s), d) for s in grid for d in dirs)


# -- serialization -------------------------------------------------------


def _real(x):
    return repr(float(x))


def schedule_to_dict(sched):
    d = {
        "format": SCHEDULE_FORMAT,
        "variant": sched.variant,
        "n": sched.n,
        "K": sched.K,
        "gamma": sched.profile.describe(),
        "lattice_gamma": sched.lattice_profile.describe(),
        "delta": [_real(v) for v in sched.delta],
        "points": [[_real(c) for c in row] for row in sched.points],
        "times": [_real(v) for v in sched.times],
        "block_bounds": [int(v) for v in sched.block_bounds],
    }
    if sched.N is not None:
        d["N"] = int(sched.N)
    if sched.symbol is not None:
        d["symbol"] = sched.symbol.describe()
    if sched.has_annuli:
        d["log_R"] = [_real(v) for v in sched.log_R]
        d["log_Rp"] = [_real(v) for v in sched.log_Rp]
        d["llog_R"] = [_real(v) for v in sched.llog_R]
        d["llog_Rp"] = [_real(v) for v in sched.llog_Rp]
    if sched.center is not None:
        d["center"] = [_real(c) for c in sched.center]
    if sched.h is not None:
        d["h"] = _real(sched.h)
    if sched.eta_scale is not None:
        d["eta_scale"] = _real(sched.eta_scale)
    if sched.beta is not None:
        d["beta"] = _real(sched.beta)
    if sched.p_indices is not None:
        d["p_indices"] = [int(v) for v in sched.p_indices]
    return d


_OPTIONAL_KEYS = {"N", "symbol", "log_R", "log_Rp", "llog_R", "llog_Rp",
                  "center", "h", "eta_scale", "beta", "p_indices"}
_REQUIRED_KEYS = {"format", "variant", "n", "K", "gamma", "lattice_gamma",
                  "delta", "points", "times", "block_bounds"}


def schedule_from_dict(d):
    if not isinstance(d, dict):
        raise InputError("schedule document must be a JSON object")
    unknown = set(d) - _REQUIRED_KEYS - _OPTIONAL_KEYS
    if unknown:
        raise InputError(f"unknown schedule fields {sorted(unknown)}")
    missing = _REQUIRED_KEYS - set(d)
    if missing:
        raise InputError(f"schedule document missing fields {sorted(missing)}")
    if d["format"] != SCHEDULE_FORMAT:
        raise InputError(f"unsupported schedule format {d['format']!r}")

    def reals(values):
        return np.array([float(v) for v in values])

    sched = Schedule(
        variant=d["variant"],
        n=int(d["n"]),
        K=int(d["K"]),
        profile=profile_from_description(d["gamma"]),
        lattice_profile=profile_from_description(d["lattice_gamma"]),
        delta=reals(d["delta"]),
        points=np.array([[float(c) for c in row] for row in d["points"]]),
        times=reals(d["times"]),
        block_bounds=np.array([int(v) for v in d["block_bounds"]], dtype=np.int64),
        N=int(d["N"]) if "N" in d else None,
        symbol=symbol_from_description(d["symbol"]) if "symbol" in d else None,
        log_R=reals(d["log_R"]) if "log_R" in d else None,
        log_Rp=reals(d["log_Rp"]) if "log_Rp" in d else None,
        llog_R=reals(d["llog_R"]) if "llog_R" in d else None,
        llog_Rp=reals(d["llog_Rp"]) if "llog_Rp" in d else None,
        center=reals(d["center"]) if "center" in d else None,
        h=float(d["h"]) if "h" in d else None,
        eta_scale=float(d["eta_scale"]) if "eta_scale" in d else None,
        beta=float(d["beta"]) if "beta" in d else None,
        p_indices=(np.array([int(v) for v in d["p_indices"]], dtype=np.int64)
                   if "p_indices" in d else None),
    )
    return sched


def save_schedule(sched, path):
    atomic_write_text(path, json.dumps(schedule_to_dict(sched), indent=1,
                                       sort_keys=True) + "\n")


def load_schedule(path, validate=True):
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    sched = schedule_from_dict(doc)
    if validate:
        validate_schedule(sched)
    return sched
