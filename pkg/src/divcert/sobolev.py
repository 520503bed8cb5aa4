"""Sobolev membership of the counterexample datum.

The datum's modulus is radial, |ξ|^{-n} (log|ξ|)^{-3/4} on each annulus,
so the H^s integrand reduces to a one-dimensional radial integral. In
u = log r it reads

    |S^{n-1}| e^{(2s-n)u} (1 + e^{-2u})^s u^{-3/2} du,

which at the critical order s = n/2 is u^{-3/2} up to a factor that is 1
to machine precision once u is large. Annuli whose radii exist only as
logarithms therefore still get exact closed-form contributions at the
critical order; above it they diverge and below it they vanish.

All norms are accumulated on the squared scale; the root is derived at
reporting time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import DomainError, InputError
from .symbol import sphere_measure

_ORDER_TOL = 1e-12


def _representable_annulus_norm(u1, u2, s, n, measure):
    def integrand(u):
        return math.exp((2.0 * s - n) * u + s * math.log1p(math.exp(-2.0 * u))
                        - 1.5 * math.log(u))

    val, _ = quad(integrand, u1, u2, epsrel=1e-10, limit=200)
    return measure * val


def _log_only_annulus_norm(sched, j, s, measure):
    """Exact at the critical order: the weight correction (1+r^{-2})^s is
    an upper factor frozen at the inner radius, invisible at machine
    precision for the radii that reach this path."""
    n = sched.n
    order = 2.0 * s - n
    if order > _ORDER_TOL:
        return math.inf
    if order < -_ORDER_TOL:
        return 0.0
    u1, _ = sched.log_radii(j)
    lu1, lu2 = sched.llog_radii(j)
    corr = (1.0 + math.exp(-2.0 * u1)) ** s if math.isfinite(u1) else 1.0
    return measure * corr * 2.0 * (math.exp(-lu1 / 2.0) - math.exp(-lu2 / 2.0))


def hs_partial_norm(sched, s, j_max):
    """Squared H^s norm of the datum truncated to the first j_max
    annuli. The block phases are unimodular and drop out, so this is the
    radial integral alone."""
    if not sched.has_annuli:
        raise InputError("schedule has no annuli")
    if s < 0.0:
        raise DomainError(f"smoothness order must be nonnegative, got {s!r}")
    if not (1 <= j_max <= sched.annulus_count):
        raise InputError(f"truncation {j_max} outside 1..{sched.annulus_count}")
    measure = sphere_measure(sched.n)
    total = 0.0
    for j in range(1, j_max + 1):
        if sched.is_log_only(j):
            total += _log_only_annulus_norm(sched, j, s, measure)
        else:
            u1, u2 = sched.log_radii(j)
            total += _representable_annulus_norm(u1, u2, s, sched.n, measure)
    return total


def hs_tail_bound(sched, from_radius_log, rho=1.5, from_radius_llog=None):
    """Closed-form bound for the squared critical-order mass above a
    radius: (1+r^2)^{n/2} < 2^{n/2} r^n collapses the integrand to
    r^{-1} (log r)^{-rho}, whose antiderivative is exact.

    from_radius_llog carries log(log r) past binary64 overflow of the
    log itself."""
    if not (rho > 1.0):
        raise DomainError(f"tail exponent must exceed 1, got {rho!r}")
    if not (from_radius_log > 0.0):
        raise DomainError(f"tail cut must have positive log radius, got {from_radius_log!r}")
    if math.isfinite(from_radius_log):
        mass = from_radius_log ** (1.0 - rho)
    elif from_radius_llog is not None:
        mass = math.exp((1.0 - rho) * from_radius_llog)
    else:
        mass = 0.0
    return 2.0 ** (sched.n / 2.0) * sphere_measure(sched.n) * mass / (rho - 1.0)


@dataclass(frozen=True)
class SobolevReport:
    s: float
    rho: float
    j_max: int
    partial_norms_squared: tuple
    tail_bound: float
    converged: bool

    @property
    def norm_squared(self):
        return self.partial_norms_squared[-1]

    @property
    def norm(self):
        return math.sqrt(self.norm_squared)

    def to_dict(self):
        return {
            "s": repr(self.s),
            "rho": repr(self.rho),
            "j_max": self.j_max,
            "partial_norms_squared": [repr(v) for v in self.partial_norms_squared],
            "tail_bound": repr(self.tail_bound),
            "converged": self.converged,
            "norm_squared": repr(self.norm_squared),
            "norm": repr(self.norm),
        }


def sobolev_report(sched, s=None, j_max=None, rho=1.5):
    """Partial squared norms through each truncation up to j_max
    (default: everything), with the closed-form bound on what the
    truncation leaves out. converged means that leftover is below 1e-2."""
    if not sched.has_annuli:
        raise InputError("schedule has no annuli")
    if s is None:
        s = sched.n / 2.0
    J = sched.annulus_count
    if j_max is None:
        j_max = J
    if not (1 <= j_max <= J):
        raise InputError(f"truncation {j_max} outside 1..{J}")
    if s < 0.0:
        raise DomainError(f"smoothness order must be nonnegative, got {s!r}")

    measure = sphere_measure(sched.n)
    partials = []
    total = 0.0
    for j in range(1, j_max + 1):
        if sched.is_log_only(j):
            total += _log_only_annulus_norm(sched, j, s, measure)
        else:
            u1, u2 = sched.log_radii(j)
            total += _representable_annulus_norm(u1, u2, s, sched.n, measure)
        partials.append(total)

    if j_max == J:
        tail = 0.0
    else:
        lr, _ = sched.log_radii(j_max + 1)
        llr, _ = sched.llog_radii(j_max + 1)
        tail = hs_tail_bound(sched, lr, rho=rho, from_radius_llog=llr)
    return SobolevReport(s=float(s), rho=float(rho), j_max=int(j_max),
                         partial_norms_squared=tuple(partials),
                         tail_bound=tail, converged=tail < 1e-2)
