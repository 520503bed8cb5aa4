"""Oscillatory annulus terms and their certified enclosures.

The j-th term of the counterexample sum, evaluated at a target (x, t), is

    (2 pi)^{-n} int over S^{n-1} int over (R_j, R'_j) of
        exp(i F(r, omega)) / (r (log r)^{3/4}) dr dsigma(omega),

    F(r, omega) = r (x - x_j) . omega + (t - t_j) phi(r, omega).

Everything here works in the radial log variable s = log r, where the
amplitude becomes exactly s^{-3/4} and the phase slope is
G(s) = r F_r'(r, omega).

Three evaluation methods, picked automatically by compute_term:

  closed-form   zero phase (target equals the term's own schedule pair);
                antiderivative 4 s^{1/4}
  direct        adaptive Gauss-Kronrod after an equal-phase-variation
                split, capped at 1e6 radians of total variation
  levin-ibp     boundary term of the integration-by-parts split evaluated
                exactly, remainder by Levin-type collocation whose cost
                does not grow with frequency

Beyond binary64 radii no evaluation is possible; term_enclosure instead
certifies upper bounds through inequality chains whose every constant is
explicit, computed entirely on log_R / llog_R data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (BudgetError, DomainError, InputError, InternalError,
                     RegimeError, StationaryPhaseError)
from .quadrature import (angular_integrate, integrate_adaptive,
                         integrate_levin, integrate_oscillatory,
                         phase_variation)
from .schedule import LOG_REPRESENTABLE, Schedule, annulus_slope_floor_log
from .symbol import sphere_measure

TWO_PI = 2.0 * math.pi

# total-phase-variation cap for the direct method
DIRECT_VARIATION_CAP = 1e6

LN2 = math.log(2.0)


@dataclass(frozen=True)
class PhaseData:
    """Phase and its first two radial derivatives at one (r, omega)."""

    F: float
    dF: float
    d2F: float


@dataclass(frozen=True)
class OscillatoryTerm:
    j: int
    value: complex
    abs_error: float
    method: str  # closed-form | direct | levin-ibp
    node_count: int


@dataclass(frozen=True)
class Enclosure:
    """Certified bound |A_j at target| <= bound.

    boundary_log / interior_log are natural logs of the two raw pieces of
    the integration-by-parts estimate, before the (2 pi)^{-n} |S^{n-1}|
    prefactor; log_bound includes the prefactor. chain names the
    inequality that lower-bounded the phase slope (or "absolute-amplitude"
    when no oscillation was used, or "uniform-geometric" for the j-free
    log-only route)."""

    j: int
    k: Optional[int]
    n: int
    log_bound: float
    boundary_log: float
    interior_log: float
    chain: str
    regime: str  # finite | log-only

    @property
    def bound(self):
        return math.exp(self.log_bound) if self.log_bound < 700.0 else math.inf

    @property
    def boundary_bound(self):
        return math.exp(self.boundary_log) if self.boundary_log < 700.0 else math.inf

    @property
    def interior_bound(self):
        return math.exp(self.interior_log) if self.interior_log < 700.0 else math.inf

    def to_dict(self):
        return {
            "j": self.j,
            "k": self.k,
            "chain": self.chain,
            "regime": self.regime,
            "log_bound": repr(self.log_bound),
            "boundary_log": repr(self.boundary_log),
            "interior_log": repr(self.interior_log),
        }


def _prefactor_log(n):
    return math.log(sphere_measure(n)) - n * math.log(TWO_PI)


def quarter_power(log_value, llog_value):
    """(log R)^{1/4} surviving overflow of log R itself."""
    if math.isfinite(log_value):
        return log_value**0.25
    return math.exp(llog_value / 4.0)


def resolve_target(sched, target):
    """Accept an annulus index (1-based) or an explicit (x, t) pair.
    Returns (x, t, index-or-None)."""
    if isinstance(target, (int, np.integer)):
        x, t = sched.annulus_target(int(target))
        return x, float(t), int(target)
    try:
        x, t = target
    except (TypeError, ValueError):
        raise InputError(f"target must be an index or an (x, t) pair, got {target!r}") from None
    x = np.asarray(x, dtype=float)
    if x.shape != (sched.n,):
        raise InputError(f"target point has shape {x.shape}, expected ({sched.n},)")
    t = float(t)
    if not (t > 0.0):
        raise DomainError(f"target time must be positive, got {t!r}")
    return x, t, None


class _TermContext:
    """Shared per-(annulus, target) data for the radial integrals."""

    def __init__(self, sched, j, target):
        if not sched.has_annuli:
            raise InputError("schedule has no annuli")
        if not (1 <= j <= sched.annulus_count):
            raise InputError(f"annulus index {j} outside 1..{sched.annulus_count}")
        self.sched = sched
        self.j = int(j)
        self.sym = sched.symbol
        x, t, k = resolve_target(sched, target)
        xj, tj = sched.annulus_target(j)
        self.x = x
        self.t = t
        self.k = k
        self.dx = x - xj
        self.dt = t - tj
        self.adx = float(np.sqrt((self.dx**2).sum()))
        self.s_lo, self.s_hi = sched.log_radii(j)
        self.log_only = sched.is_log_only(j)

    @property
    def zero_phase(self):
        return self.adx == 0.0 and self.dt == 0.0

    def require_representable(self):
        if self.log_only:
            raise RegimeError(
                f"annulus {self.j} radii exist only as logarithms "
                f"(log R' = {self.s_hi!r} > {LOG_REPRESENTABLE}); "
                f"use term_enclosure"
            )

    # radial callables, all vectorized over s, for a fixed direction

    def phase(self, omega):
        dxw = float(self.dx @ omega)
        dt = self.dt
        sym = self.sym

        def F(s):
            r = np.exp(s)
            return r * dxw + dt * sym._phi(r, omega)

        return F

    def slope(self, omega):
        """G(s) = r * d/dr F."""
        dxw = float(self.dx @ omega)
        dt = self.dt
        sym = self.sym

        def G(s):
            r = np.exp(s)
            return r * (dxw + dt * sym._phi_dr(r, omega))

        return G

    def amplitude(self):
        def A(s):
            return s**-0.75

        return A

    def ibp_rhs(self, omega):
        """w(s) = i (A G' - A' G) / G^2, the amplitude left after peeling
        off the boundary term; G' = G + r^2 (t - t_j) phi''."""
        dxw = float(self.dx @ omega)
        dt = self.dt
        sym = self.sym

        def w(s):
            r = np.exp(s)
            G = r * (dxw + dt * sym._phi_dr(r, omega))
            Gp = G + r * r * dt * sym._phi_drr(r, omega)
            A = s**-0.75
            Ap = -0.75 * s**-1.75
            return 1j * (A * Gp - Ap * G) / (G * G)

        return w


def phase_at(sched, j, target, r, omega):
    """Exact phase data at one (r, omega) inside the annulus."""
    ctx = _TermContext(sched, j, target)
    ctx.require_representable()
    r = float(r)
    r_lo = math.exp(ctx.s_lo)
    r_hi = math.exp(ctx.s_hi)
    if not (r_lo * (1.0 - 1e-12) <= r <= r_hi * (1.0 + 1e-12)):
        raise DomainError(f"r = {r!r} outside annulus {j} radii [{r_lo!r}, {r_hi!r}]")
    w = np.asarray(omega, dtype=float)
    F = float(r * (ctx.dx @ w) + ctx.dt * sched.symbol.phi(r, w))
    dF = float(ctx.dx @ w + ctx.dt * sched.symbol.phi_dr(r, w))
    d2F = float(ctx.dt * sched.symbol.phi_drr(r, w))
    return PhaseData(F=F, dF=dF, d2F=d2F)


# -- radial integrals ----------------------------------------------------


def radial_integral_direct(sched, j, target, omega, tol=1e-8):
    """Brute-force oracle: adaptive quadrature in s after an
    equal-variation split. Only for phase variation under the cap."""
    ctx = _TermContext(sched, j, target)
    ctx.require_representable()
    w = np.asarray(omega, dtype=float)
    value, err, evals = integrate_oscillatory(
        ctx.amplitude(), ctx.phase(w), ctx.s_lo, ctx.s_hi, tol,
        variation_cap=DIRECT_VARIATION_CAP,
    )
    return OscillatoryTerm(j=ctx.j, value=value, abs_error=err,
                           method="direct", node_count=evals)


def _check_no_stationary(G_fn, s_lo, s_hi, j):
    s = np.linspace(s_lo, s_hi, 129)
    g = np.asarray(G_fn(s), dtype=float)
    top = float(np.abs(g).max())
    if top == 0.0 or float(np.abs(g).min()) < 1e-13 * top or np.any(g[:-1] * g[1:] < 0.0):
        raise StationaryPhaseError(
            f"phase slope vanishes or changes sign inside annulus {j}; "
            f"the boundary-split evaluation needs |F'| > 0"
        )


def radial_integral_ibp(sched, j, target, omega, tol=1e-8, depth=2,
                        interior="levin"):
    """Boundary term of the integration-by-parts split evaluated exactly,
    remainder by collocation (default) or by direct quadrature
    (interior="direct", for cross-checks in the low-frequency regime).

    depth >= 2 allows the remainder to be absorbed as the integral of the
    absolute amplitude when the collocation budget runs out; depth == 1
    re-raises the budget failure instead.
    """
    if interior not in ("levin", "direct"):
        raise InputError(f"interior must be 'levin' or 'direct', got {interior!r}")
    if depth < 1:
        raise InputError(f"depth must be >= 1, got {depth}")
    ctx = _TermContext(sched, j, target)
    ctx.require_representable()
    w = np.asarray(omega, dtype=float)
    G_fn = ctx.slope(w)
    F_fn = ctx.phase(w)
    _check_no_stationary(G_fn, ctx.s_lo, ctx.s_hi, ctx.j)

    ends = np.array([ctx.s_lo, ctx.s_hi])
    G_ends = np.asarray(G_fn(ends), dtype=float)
    F_ends = np.asarray(F_fn(ends), dtype=float)
    A_ends = ends**-0.75
    boundary = (A_ends[1] * np.exp(1j * F_ends[1]) / (1j * G_ends[1])
                - A_ends[0] * np.exp(1j * F_ends[0]) / (1j * G_ends[0]))
    nodes = 2

    rhs = ctx.ibp_rhs(w)
    if interior == "direct":
        b_val, b_err, used = integrate_oscillatory(
            rhs, F_fn, ctx.s_lo, ctx.s_hi, tol,
            variation_cap=DIRECT_VARIATION_CAP,
        )
        nodes += used
    else:
        try:
            b_val, b_err, used = integrate_levin(
                G_fn, rhs, F_fn, ctx.s_lo, ctx.s_hi, tol)
            nodes += used
        except BudgetError as exc:
            if depth < 2:
                raise
            # absolute-amplitude absorption of the remainder
            abs_val, abs_err, used = integrate_adaptive(
                lambda s: np.abs(rhs(s)), ctx.s_lo, ctx.s_hi,
                max(tol, 1e-6))
            nodes += used
            ceiling = abs_val + abs_err
            if exc.abs_error is not None and exc.abs_error <= ceiling:
                b_val, b_err = exc.value, exc.abs_error
            else:
                b_val, b_err = 0.0 + 0.0j, ceiling

    value = boundary - b_val
    err = b_err + 4.0 * np.finfo(float).eps * abs(boundary)
    return OscillatoryTerm(j=ctx.j, value=complex(value), abs_error=float(err),
                           method="levin-ibp", node_count=nodes)


def _probe_variation(ctx):
    """Largest probed phase variation over a few directions; routing
    heuristic only, the direct engine re-probes on its own grid."""
    n = ctx.sched.n
    if n == 1:
        dirs = [np.array([1.0]), np.array([-1.0])]
    else:
        from .symbol import angular_grid

        full, _ = angular_grid(n)
        dirs = list(full[:: max(1, len(full) // 8)])
    worst = 0.0
    for w in dirs:
        var, _, _ = phase_variation(ctx.phase(w), ctx.s_lo, ctx.s_hi)
        worst = max(worst, var)
    return worst


def compute_term(sched, j, target, tol=1e-8, method=None):
    """Full term: (2 pi)^{-n} times the angular integral of the radial
    integral, with the method picked by regime unless forced.

    The tolerance budget is split so that angular-rule error and the
    worst radial error each stay under half of tol after the prefactor.
    """
    ctx = _TermContext(sched, j, target)
    if method not in (None, "closed-form", "direct", "levin-ibp"):
        raise InputError(f"unknown method {method!r}")

    if ctx.zero_phase and method in (None, "closed-form"):
        lr, lrp = sched.log_radii(j)
        llr, llrp = sched.llog_radii(j)
        value = math.exp(_prefactor_log(sched.n)) * 4.0 * (
            quarter_power(lrp, llrp) - quarter_power(lr, llr))
        return OscillatoryTerm(j=ctx.j, value=complex(value, 0.0),
                               abs_error=8.0 * np.finfo(float).eps * value,
                               method="closed-form", node_count=0)
    if method == "closed-form":
        raise InputError("closed form applies only to the zero-phase diagonal")

    ctx.require_representable()
    if method is None:
        method = "direct" if _probe_variation(ctx) <= 0.99 * DIRECT_VARIATION_CAP \
            else "levin-ibp"

    measure = sphere_measure(sched.n)
    scale = TWO_PI**sched.n
    rad_tol = tol * scale / (2.0 * measure)
    ang_tol = tol * scale / 2.0

    def run(picked):
        rad_errs = []
        rad_nodes = [0]

        def g(dirs):
            out = np.empty(len(dirs), dtype=complex)
            for i, w in enumerate(dirs):
                if picked == "direct":
                    tm = radial_integral_direct(sched, j, target, w, tol=rad_tol)
                else:
                    tm = radial_integral_ibp(sched, j, target, w, tol=rad_tol)
                out[i] = tm.value
                rad_errs.append(tm.abs_error)
                rad_nodes[0] += tm.node_count
            return out

        raw, ang_err, _ = angular_integrate(g, sched.n, ang_tol)
        value = raw / scale
        err = (ang_err + measure * max(rad_errs)) / scale
        return OscillatoryTerm(j=ctx.j, value=complex(value),
                               abs_error=float(err), method=picked,
                               node_count=rad_nodes[0])

    try:
        return run(method)
    except RegimeError:
        if method == "direct":
            # a direction's probed variation crossed the cap; the
            # boundary-split path has no such limit
            return run("levin-ibp")
        raise


def diagonal_term_exact(sched, k):
    """Exact zero-phase term value: the closed-form growth seed
    c_n 4 (1 - N^{-1/4}) (log R'_k)^{1/4}."""
    if not sched.has_annuli:
        raise InputError("schedule has no annuli")
    if not (1 <= k <= sched.annulus_count):
        raise InputError(f"annulus index {k} outside 1..{sched.annulus_count}")
    _, lrp = sched.log_radii(k)
    _, llrp = sched.llog_radii(k)
    c = math.exp(_prefactor_log(sched.n)) * 4.0 * (1.0 - sched.N**-0.25)
    return c * quarter_power(lrp, llrp)


# -- certified enclosures ------------------------------------------------


def _absolute_chain(sched, j, k):
    lr, lrp = sched.log_radii(j)
    llr, llrp = sched.llog_radii(j)
    delta = quarter_power(lrp, llrp) - quarter_power(lr, llr)
    interior_log = math.log(4.0) + (math.log(delta) if delta > 0.0 else -math.inf)
    return Enclosure(
        j=j, k=k, n=sched.n,
        log_bound=_prefactor_log(sched.n) + interior_log,
        boundary_log=-math.inf,
        interior_log=interior_log,
        chain="absolute-amplitude",
        regime="log-only" if sched.is_log_only(j) else "finite",
    )


def _boundary_pieces_log(sym, s_lo, s_hi, inv_slope_extra_log):
    """log of u(R)/(scaled |F'|) summed over both endpoints, where the
    scaled |F'| at radius R is exp(inv_slope_extra_log) * |phi'(R)|-floor.
    s_hi may be astronomically large; its piece just vanishes."""
    pieces = []
    for s in (s_lo, s_hi):
        if not math.isfinite(s):
            continue
        pieces.append(inv_slope_extra_log - s - 0.75 * math.log(s)
                      - sym.log_slope_floor(s))
    if len(pieces) == 1:
        return pieces[0]
    return float(np.logaddexp(pieces[0], pieces[1]))


def _halved_chain(sched, j, k, dt_abs, adx, chain="phase-slope-halved",
                  factors=(2.0, 4.0)):
    """|F'| >= |t - t_j| |phi'| / fac on the annulus, valid once
    adx <= |t - t_j| * slope_floor / fac; boundary and interior pieces
    with fully explicit constants. factors = (fac, fac^2/fac) as the
    boundary and curvature multipliers: (2, 4) for the halved chain,
    (3, 9) for the one-third chain."""
    sym = sched.symbol
    s_lo, s_hi = sched.log_radii(j)
    fac, fac_sq = factors
    floor_ann_log = annulus_slope_floor_log(sym, s_lo, s_hi)
    if adx > 0.0:
        need = math.log(fac * adx / dt_abs)
        if not floor_ann_log > need:
            raise InternalError(
                f"slope floor on annulus {j} does not dominate the spatial "
                f"offset (log floor {floor_ann_log:.6g} <= {need:.6g}); "
                f"schedule guarantee violated"
            )
    lead = math.log(fac / dt_abs)
    boundary_log = _boundary_pieces_log(sym, s_lo, s_hi, lead)
    i1 = (lead + math.log1p(3.0 / (4.0 * s_lo)) - floor_ann_log
          - 0.75 * math.log(s_lo) - s_lo)
    c_log = sym.log_curvature_ratio_sup(s_lo, s_hi)
    i2 = math.log(fac_sq / dt_abs) + c_log - s_lo
    interior_log = float(np.logaddexp(i1, i2))
    return Enclosure(
        j=j, k=k, n=sched.n,
        log_bound=_prefactor_log(sched.n) + float(np.logaddexp(boundary_log, interior_log)),
        boundary_log=boundary_log,
        interior_log=interior_log,
        chain=chain,
        regime="log-only" if sched.is_log_only(j) else "finite",
    )


def _eta_chain(sched, j, k, dt, eta_k):
    """|F'| >= eta_k from the slope floor h and the subsequence spacing;
    curvature handled through the power-weighted bound at the schedule's
    beta."""
    sym = sched.symbol
    beta = sched.beta
    s_lo, s_hi = sched.log_radii(j)
    log_eta = math.log(eta_k)
    boundary_log = _boundary_pieces_log_flat(s_lo, s_hi, -log_eta)
    i1 = (math.log1p(3.0 / (4.0 * s_lo)) - log_eta
          - 0.75 * math.log(s_lo) - s_lo)
    cb_log = sym.log_weak_curvature_sup(s_lo, s_hi, beta)
    i2 = (math.log(dt) + cb_log - 2.0 * log_eta - math.log(beta)
          - beta * s_lo)
    interior_log = float(np.logaddexp(i1, i2))
    return Enclosure(
        j=j, k=k, n=sched.n,
        log_bound=_prefactor_log(sched.n) + float(np.logaddexp(boundary_log, interior_log)),
        boundary_log=boundary_log,
        interior_log=interior_log,
        chain="phase-slope-eta",
        regime="log-only" if sched.is_log_only(j) else "finite",
    )


def _boundary_pieces_log_flat(s_lo, s_hi, lead_log):
    """Endpoint amplitude pieces u(R) scaled by a slope-free constant."""
    pieces = []
    for s in (s_lo, s_hi):
        if not math.isfinite(s):
            continue
        pieces.append(lead_log - s - 0.75 * math.log(s))
    if len(pieces) == 1:
        return pieces[0]
    return float(np.logaddexp(pieces[0], pieces[1]))


def uniform_chain_log(sched, j, eta_k=None):
    """(boundary_log, interior_log) of the j-free geometric route: every
    j-dependent quantity is replaced by a schedule-level constant and the
    constructed radius growth supplies the 2^{-j} (or 2^{-j/beta}) decay.
    Valid for any scheduled target with index below j; the weak variant
    additionally needs the target's narrowed width eta_k."""
    sym = sched.symbol
    L1 = float(sched.log_R[0])
    log_L1_amp = 0.75 * math.log(L1)
    if sched.variant == "theorem1":
        h1_log = sym.log_slope_floor(L1)
        c_b = LN2 - log_L1_amp - h1_log
        c_i1 = math.log1p(3.0 / (4.0 * L1)) - h1_log - log_L1_amp
        c_i2 = LN2 + sym.log_curvature_ratio_sup(L1, math.inf)
        decay = -j * LN2
        return c_b + decay, float(np.logaddexp(c_i1, c_i2)) + decay
    if sched.variant == "theorem2-strong":
        h_log = math.log(sched.h)
        c_b = math.log(3.0) - log_L1_amp - h_log
        c_i1 = math.log(1.5) + math.log1p(3.0 / (4.0 * L1)) - h_log - log_L1_amp
        c_i2 = math.log(4.5) + sym.log_curvature_ratio_sup(L1, math.inf)
        decay = -j * LN2
        return c_b + decay, float(np.logaddexp(c_i1, c_i2)) + decay
    if sched.variant == "theorem2-weak":
        if eta_k is None:
            raise InputError("weak uniform chain needs the target's narrowed width")
        beta = sched.beta
        log_eta = math.log(eta_k)
        # r >= 2 * 2^{(j+2)/beta} from construction, so the boundary and
        # first interior piece decay at rate 2^{-j/beta}; the curvature
        # piece uses r^{-beta} >= 2^{-beta} 2^{-(j+2)} directly
        slow = -(j + 2.0) * LN2 / beta - LN2
        c_b = LN2 - log_L1_amp - log_eta + slow
        c_i1 = math.log1p(3.0 / (4.0 * L1)) - log_L1_amp - log_eta + slow
        cb_log = sym.log_weak_curvature_sup(L1, math.inf, beta)
        c_i2 = (cb_log - math.log(beta) - 2.0 * log_eta
                - beta * LN2 - (j + 2.0) * LN2)
        return c_b, float(np.logaddexp(c_i1, c_i2))
    raise InternalError(f"unknown variant {sched.variant!r}")


def _uniform_enclosure(sched, j, k, eta_k=None):
    boundary_log, interior_log = uniform_chain_log(sched, j, eta_k=eta_k)
    return Enclosure(
        j=j, k=k, n=sched.n,
        log_bound=_prefactor_log(sched.n) + float(np.logaddexp(boundary_log, interior_log)),
        boundary_log=boundary_log,
        interior_log=interior_log,
        chain="uniform-geometric",
        regime="log-only",
    )


def term_enclosure(sched, j, k):
    """Certified bound for term j evaluated at the k-th scheduled target.

    j < k takes the absolute-amplitude route (no oscillation used);
    j > k lower-bounds the phase slope by the schedule's separation
    guarantees. The diagonal j == k has an exact value instead."""
    if not sched.has_annuli:
        raise InputError("schedule has no annuli")
    J = sched.annulus_count
    if not (1 <= j <= J and 1 <= k <= J):
        raise InputError(f"indices ({j}, {k}) outside 1..{J}")
    if j == k:
        raise DomainError("diagonal term has an exact value; use diagonal_term_exact")
    if j < k:
        return _absolute_chain(sched, j, k)

    x_k, t_k = sched.annulus_target(k)
    x_j, t_j = sched.annulus_target(j)
    dt = t_k - t_j
    if not dt > 0.0:
        raise InternalError(f"scheduled times not decreasing between {k} and {j}")
    adx = float(np.sqrt(((x_k - x_j) ** 2).sum()))
    s_lo, _ = sched.log_radii(j)

    if sched.variant == "theorem1":
        if math.isfinite(s_lo):
            return _halved_chain(sched, j, k, dt, adx)
        return _uniform_enclosure(sched, j, k)

    eta_k = sched.eta(t_k)
    if not (adx < 2.0 * eta_k * (1.0 + 1e-12)
            and sched.h * dt >= 3.0 * eta_k * (1.0 - 1e-12)):
        raise InternalError(
            f"subsequence guarantees violated for pair ({k}, {j}): "
            f"offset {adx!r}, width {eta_k!r}, gap {dt!r}"
        )
    if sched.variant == "theorem2-strong":
        if math.isfinite(s_lo):
            return _halved_chain(sched, j, k, dt, adx,
                                 chain="phase-slope-third", factors=(3.0, 9.0))
        return _uniform_enclosure(sched, j, k)
    if math.isfinite(s_lo):
        return _eta_chain(sched, j, k, dt, eta_k)
    return _uniform_enclosure(sched, j, k, eta_k=eta_k)


def term_enclosure_at(sched, j, x, t):
    """Certified bound for term j at an arbitrary target (x, t).

    Uses the slope-halved chain whenever the target's time offset
    dominates its spatial offset against this annulus's slope floor
    (valid for either sign of the offset), and falls back to the
    absolute-amplitude bound otherwise. In the log-only regime without a
    usable halved chain there is no finite fallback, which is the honest
    answer: the absolute bound grows with the annulus."""
    x, t, _ = resolve_target(sched, (x, t))
    if not (1 <= j <= sched.annulus_count):
        raise InputError(f"annulus index {j} outside 1..{sched.annulus_count}")
    x_j, t_j = sched.annulus_target(j)
    dt_abs = abs(t - t_j)
    adx = float(np.sqrt(((x - x_j) ** 2).sum()))
    s_lo, s_hi = sched.log_radii(j)

    usable_halved = False
    if dt_abs > 0.0 and math.isfinite(s_lo):
        floor_log = annulus_slope_floor_log(sched.symbol, s_lo, s_hi)
        usable_halved = adx == 0.0 or floor_log > math.log(2.0 * adx / dt_abs)
    if usable_halved:
        enc = _halved_chain(sched, j, None, dt_abs, adx)
        if sched.variant == "theorem2-weak":
            # the curvature-ratio sup may be infinite here; swap in the
            # eta-style curvature piece when it is not
            if not math.isfinite(enc.log_bound):
                return _absolute_chain(sched, j, None)
        return enc
    return _absolute_chain(sched, j, None)


def estimated_log_variation(sched, j, x, t):
    """log of a crude upper proxy for term j's phase variation at (x, t):
    |x - x_j| R'_j plus |t - t_j| sup|phi|(R'_j). Routing and trust
    decisions only; -inf for the zero phase."""
    x = np.asarray(x, dtype=float)
    x_j, t_j = sched.annulus_target(j)
    adx = float(np.sqrt(((x - x_j) ** 2).sum()))
    dt_abs = abs(float(t) - t_j)
    _, s_hi = sched.log_radii(j)
    pieces = []
    if adx > 0.0:
        pieces.append(math.log(adx) + s_hi)
    if dt_abs > 0.0:
        pieces.append(math.log(dt_abs) + sched.symbol.log_phi_mag(s_hi))
    if not pieces:
        return -math.inf
    if len(pieces) == 1:
        return pieces[0]
    return float(np.logaddexp(pieces[0], pieces[1]))


# -- diagnostics ---------------------------------------------------------


def trace_term(sched, j, target, tol=1e-8, max_directions=16):
    """Structured dump of one term evaluation for the CLI trace path."""
    ctx = _TermContext(sched, j, target)
    doc = {
        "j": ctx.j,
        "k": ctx.k,
        "target_x": [repr(float(c)) for c in ctx.x],
        "target_t": repr(ctx.t),
        "log_R": repr(ctx.s_lo),
        "log_Rp": repr(ctx.s_hi),
        "regime": "log-only" if ctx.log_only else "finite",
    }
    if ctx.k is not None and ctx.k != ctx.j:
        doc["enclosure"] = term_enclosure(sched, j, ctx.k).to_dict()
    elif ctx.k is None:
        doc["enclosure"] = term_enclosure_at(sched, j, ctx.x, ctx.t).to_dict()
    if ctx.log_only:
        doc["term"] = None
        return doc
    term = compute_term(sched, j, target, tol=tol)
    doc["term"] = {
        "value_re": repr(term.value.real),
        "value_im": repr(term.value.imag),
        "abs_error": repr(term.abs_error),
        "method": term.method,
        "node_count": term.node_count,
    }
    if term.method != "closed-form":
        from .symbol import angular_grid

        dirs, _ = angular_grid(sched.n)
        probes = []
        for w in dirs[:max_directions]:
            ends = np.array([ctx.s_lo, ctx.s_hi])
            F = np.asarray(ctx.phase(w)(ends), dtype=float)
            G = np.asarray(ctx.slope(w)(ends), dtype=float)
            probes.append({
                "omega": [repr(float(c)) for c in w],
                "F_ends": [repr(float(v)) for v in F],
                "slope_ends": [repr(float(v)) for v in G],
            })
        doc["direction_probes"] = probes
    return doc
