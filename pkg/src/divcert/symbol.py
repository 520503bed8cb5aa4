"""Dispersion symbols in polar form.

A symbol represents a real Fourier multiplier phi(xi) = phi(|xi|, xi/|xi|)
driving a unitary evolution exp(i t phi(D)). Downstream code consumes a
symbol only through phi and its first two radial derivatives, plus a few
log-domain bounds that stay meaningful once radii leave the binary64 range.

Built-in kinds:

    homogeneous        phi = r**a, a > 0
    homogeneous-sum    phi = sum_i c_i(omega) * r**a_i
    rlogr              phi = r * log(r)
    exponential        phi = exp(mu(omega) * r**beta)
    user               arbitrary (phi, phi_dr, phi_drr) callables

Radial evaluation is vectorized over r. Directions omega are unit vectors
of shape (n,); for n = 1 the unit sphere is the two-point set {+1, -1}.

All evaluation requires r strictly above the symbol's validity radius;
below it the derivative bounds that the certificates rely on are not
claimed to hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InputError

# Saturation point for log-domain slope values. Slopes are clipped here
# before exponentiation; clipping lowers slope estimates, which only
# loosens (never invalidates) the certified bounds built on them.
LOG_CLIP = 650.0

_UNIT_TOL = 1e-9


def _check_omega(omega, n):
    w = np.asarray(omega, dtype=float)
    if w.shape != (n,):
        raise InputError(f"direction has shape {w.shape}, expected ({n},)")
    norm = float(np.sqrt(np.sum(w * w)))
    if abs(norm - 1.0) > _UNIT_TOL:
        raise InputError(f"direction is not unit length (|omega| = {norm!r})")
    return w


def sphere_measure(n):
    """Surface measure of the unit sphere in R^n; the n = 1 sphere is the
    two-point set with counting measure 2."""
    if n < 1:
        raise InputError(f"dimension must be at least 1, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def angular_grid(n, polar_points=32, azimuth_points=64):
    """Direction grid on the unit sphere, one row per direction.

    Returns (directions, weights) with weights summing to the sphere
    measure. n = 1 is exact; n = 2 uses the trapezoid rule on the circle
    (spectrally accurate for smooth profiles); n = 3 uses Gauss-Legendre
    in the polar cosine crossed with a trapezoid azimuth.
    """
    if n == 1:
        dirs = np.array([[1.0], [-1.0]])
        return dirs, np.array([1.0, 1.0])
    if n == 2:
        theta = np.linspace(0.0, 2.0 * math.pi, azimuth_points, endpoint=False)
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
        w = np.full(azimuth_points, 2.0 * math.pi / azimuth_points)
        return dirs, w
    if n == 3:
        u, wu = np.polynomial.legendre.leggauss(polar_points)
        theta = np.linspace(0.0, 2.0 * math.pi, azimuth_points, endpoint=False)
        st = np.sqrt(1.0 - u**2)
        dirs = np.empty((polar_points * azimuth_points, 3))
        w = np.empty(polar_points * azimuth_points)
        for i in range(polar_points):
            rows = slice(i * azimuth_points, (i + 1) * azimuth_points)
            dirs[rows, 0] = st[i] * np.cos(theta)
            dirs[rows, 1] = st[i] * np.sin(theta)
            dirs[rows, 2] = u[i]
            w[rows] = wu[i] * 2.0 * math.pi / azimuth_points
        return dirs, w
    raise InputError(f"no angular grid implemented for dimension {n}")


class DispersionSymbol:
    """Base class: shared validation and generic log-domain fallbacks.

    Subclasses provide phi / phi_dr / phi_drr on validated inputs via
    _phi / _phi_dr / _phi_drr, and may override the log-domain hooks with
    closed forms. The generic hooks evaluate linearly and take logs, which
    is fine whenever r itself is representable.
    """

    kind = "abstract"
    # True when inf over directions of |phi'| is nondecreasing in r on
    # r > validity_radius. All built-ins set this; it lets radius searches
    # use bisection and annulus slope floors use the inner endpoint.
    slope_floor_nondecreasing = False

    def __init__(self, n, validity_radius):
        if n < 1 or n != int(n):
            raise InputError(f"dimension must be a positive integer, got {n}")
        if not (validity_radius >= 0.0) or not math.isfinite(validity_radius):
            raise InputError(f"validity radius must be finite and nonnegative, got {validity_radius}")
        self.n = int(n)
        self.validity_radius = float(validity_radius)

    # -- public evaluation ------------------------------------------------

    def phi(self, r, omega):
        r = self._check_r(r)
        w = _check_omega(omega, self.n)
        return self._phi(r, w)

    def phi_dr(self, r, omega):
        r = self._check_r(r)
        w = _check_omega(omega, self.n)
        return self._phi_dr(r, w)

    def phi_drr(self, r, omega):
        r = self._check_r(r)
        w = _check_omega(omega, self.n)
        return self._phi_drr(r, w)

    def _check_r(self, r):
        arr = np.asarray(r, dtype=float)
        if arr.size and float(np.min(arr)) <= self.validity_radius:
            raise DomainError(
                f"radius {float(np.min(arr))!r} is at or below the validity radius "
                f"{self.validity_radius!r}"
            )
        return arr

    # -- log-domain bounds ------------------------------------------------
    # s always denotes log r. These are used by schedule construction and
    # by the certified enclosures, so the floor must be a true lower bound
    # and the ratio sups true upper bounds wherever they claim finiteness.

    def log_slope_at(self, s, omega):
        """log |phi'(e^s, omega)| for a single direction."""
        r = math.exp(min(s, LOG_CLIP))
        v = float(np.abs(self._phi_dr(np.asarray(r), _check_omega(omega, self.n))))
        return math.log(v) if v > 0.0 else -math.inf

    def log_slope_floor(self, s):
        """log of (a lower bound for) inf over directions of |phi'(e^s, .)|.

        Generic fallback minimizes over the default angular grid, which is
        exact for n = 1 and an approximation otherwise.
        """
        dirs, _ = angular_grid(self.n)
        return min(self.log_slope_at(s, d) for d in dirs)

    def log_phi_mag(self, s):
        """log of an upper bound for sup over directions of |phi(e^s, .)|.
        Used for phase-variation estimates, never for certificates."""
        r = math.exp(min(s, LOG_CLIP))
        dirs, _ = angular_grid(self.n)
        with np.errstate(over="ignore"):
            vals = [float(np.abs(self._phi(np.asarray(r), d))) for d in dirs]
        top = max(vals)
        return math.log(top) if top > 0.0 else -math.inf

    def log_curvature_ratio_sup(self, s_lo, s_hi):
        """log of an upper bound for
            sup over [e^{s_lo}, e^{s_hi}] x sphere of
                r |phi''| / (phi'^2 (log r)^{3/4}).
        Generic fallback samples a geometric grid crossed with the default
        angular grid."""
        return self._grid_ratio_sup(s_lo, s_hi, self._log_ratio_node)

    def log_weak_curvature_sup(self, s_lo, s_hi, beta):
        """log of an upper bound for
            sup over the annulus x sphere of r^beta |phi''| / (log r)^{3/4}."""
        return self._grid_ratio_sup(s_lo, s_hi, lambda s, w: self._log_weak_node(s, w, beta))

    def clearing_log_radius(self, log_threshold, s_max=710.0):
        """Smallest s with log_slope_floor(s) > log_threshold, or +inf if
        the floor never clears the threshold below exp(s_max).

        Requires a nondecreasing slope floor; bisects to 1e-12 relative
        width and rounds outward so the returned s is strictly cleared.
        """
        if not self.slope_floor_nondecreasing:
            raise InputError(f"{self.kind} symbol does not declare a monotone slope floor")
        s_lo = math.log(self.validity_radius + 1e-9) if self.validity_radius > 0 else -6.0
        if self.log_slope_floor(s_lo) > log_threshold:
            return s_lo
        if self.log_slope_floor(s_max) <= log_threshold:
            return math.inf
        lo, hi = s_lo, s_max
        while hi - lo > 1e-12 * max(1.0, abs(hi)):
            mid = 0.5 * (lo + hi)
            if self.log_slope_floor(mid) > log_threshold:
                hi = mid
            else:
                lo = mid
        return hi

    # -- shared helpers ---------------------------------------------------

    def _log_ratio_node(self, s, omega):
        r = np.asarray(math.exp(min(s, LOG_CLIP)))
        w = _check_omega(omega, self.n)
        with np.errstate(over="ignore", divide="ignore"):
            dp = float(np.abs(self._phi_dr(r, w)))
            dpp = float(np.abs(self._phi_drr(r, w)))
        if dpp == 0.0:
            return -math.inf
        if dp == 0.0 or not math.isfinite(dp):
            # vanished slope means an unbounded ratio; infinite slope from
            # overflow means the true ratio is tiny but unknown here
            return math.inf if dp == 0.0 else -math.inf
        return s + math.log(dpp) - 2.0 * math.log(dp) - 0.75 * math.log(s)

    def _log_weak_node(self, s, omega, beta):
        r = np.asarray(math.exp(min(s, LOG_CLIP)))
        w = _check_omega(omega, self.n)
        with np.errstate(over="ignore"):
            dpp = float(np.abs(self._phi_drr(r, w)))
        if dpp == 0.0:
            return -math.inf
        if not math.isfinite(dpp):
            return math.inf
        return beta * s + math.log(dpp) - 0.75 * math.log(s)

    def _grid_ratio_sup(self, s_lo, s_hi, node_fn, points=64):
        if not (s_lo > 0.0):
            raise DomainError(f"ratio bounds need log r > 0, got s_lo = {s_lo!r}")
        hi = min(s_hi, max(s_lo + 1.0, 700.0))
        grid = np.linspace(s_lo, hi, points)
        dirs, _ = angular_grid(self.n)
        return max(node_fn(float(s), d) for s in grid for d in dirs)

    def describe(self):
        raise InputError(f"{self.kind} symbol is not serializable")

    def __repr__(self):
        return f"<{type(self).__name__} n={self.n} R={self.validity_radius}>"


class HomogeneousSymbol(DispersionSymbol):
    """phi = r**a with a > 0. Radial, so every angular bound is exact."""

    kind = "homogeneous"
    slope_floor_nondecreasing = True

    def __init__(self, a, n=1, validity_radius=2.0):
        super().__init__(n, validity_radius)
        if not (a > 0.0) or not math.isfinite(a):
            raise InputError(f"homogeneity degree must be positive and finite, got {a}")
        # a < 1 is constructible but the slope decays, so the growth
        # checker will report no verdict for it
        self.a = float(a)

    def _phi(self, r, w):
        return r**self.a

    def _phi_dr(self, r, w):
        return self.a * r ** (self.a - 1.0)

    def _phi_drr(self, r, w):
        return self.a * (self.a - 1.0) * r ** (self.a - 2.0)

    def log_slope_at(self, s, omega):
        return math.log(self.a) + (self.a - 1.0) * s

    def log_slope_floor(self, s):
        return math.log(self.a) + (self.a - 1.0) * s

    def log_phi_mag(self, s):
        return self.a * s

    def clearing_log_radius(self, log_threshold, s_max=710.0):
        if self.a == 1.0:
            return -math.inf if log_threshold < 0.0 else math.inf
        s = (log_threshold - math.log(self.a)) / (self.a - 1.0)
        if self.a > 1.0:
            return s * (1.0 + 1e-12) + 1e-12
        return math.inf

    def _closed_ratio_log(self, s):
        if self.a == 1.0:
            return -math.inf
        return (
            math.log(abs(self.a - 1.0) / self.a)
            + (1.0 - self.a) * s
            - 0.75 * math.log(s)
        )

    def log_curvature_ratio_sup(self, s_lo, s_hi):
        # c + (1-a)s - (3/4)log s has no interior maximum on s > 0, so the
        # sup over the annulus sits at an endpoint
        if not (s_lo > 0.0):
            raise DomainError(f"ratio bounds need log r > 0, got s_lo = {s_lo!r}")
        return max(self._closed_ratio_log(s_lo), self._closed_ratio_log(min(s_hi, 1e308)))

    def _closed_weak_log(self, s, beta):
        if self.a == 1.0:
            return -math.inf
        return (
            math.log(self.a * abs(self.a - 1.0))
            + (beta + self.a - 2.0) * s
            - 0.75 * math.log(s)
        )

    def log_weak_curvature_sup(self, s_lo, s_hi, beta):
        if not (s_lo > 0.0):
            raise DomainError(f"ratio bounds need log r > 0, got s_lo = {s_lo!r}")
        if self.a == 1.0:
            return -math.inf
        if beta + self.a - 2.0 > 0.0 and not math.isfinite(s_hi):
            return math.inf
        return max(self._closed_weak_log(s_lo, beta), self._closed_weak_log(min(s_hi, 1e308), beta))

    def describe(self):
        return {
            "kind": self.kind,
            "a": self.a,
            "n": self.n,
            "validity_radius": self.validity_radius,
        }


class RLogRSymbol(DispersionSymbol):
    """phi = r log r. phi' = log r + 1 grows without bound but slower than
    any power; the curvature ratio is 1 / ((s+1)^2 s^{3/4})."""

    kind = "rlogr"
    slope_floor_nondecreasing = True

    def __init__(self, n=1, validity_radius=2.0):
        if validity_radius < 1.0:
            # keep log r positive so phi' = log r + 1 > 1 on the domain
            raise InputError(f"rlogr needs validity radius >= 1, got {validity_radius}")
        super().__init__(n, validity_radius)

    def _phi(self, r, w):
        return r * np.log(r)

    def _phi_dr(self, r, w):
        return np.log(r) + 1.0

    def _phi_drr(self, r, w):
        return 1.0 / r

    def log_slope_at(self, s, omega):
        return math.log(s + 1.0)

    def log_slope_floor(self, s):
        return math.log(s + 1.0)

    def log_phi_mag(self, s):
        return s + math.log(s) if s > 0 else s

    def clearing_log_radius(self, log_threshold, s_max=710.0):
        # log(s+1) > log_threshold iff s > exp(log_threshold) - 1
        s = math.exp(log_threshold) - 1.0
        lo = math.log(self.validity_radius + 1e-9)
        return max(s * (1.0 + 1e-12) + 1e-12, lo)

    def _closed_ratio_log(self, s):
        return -2.0 * math.log(s + 1.0) - 0.75 * math.log(s)

    def log_curvature_ratio_sup(self, s_lo, s_hi):
        if not (s_lo > 0.0):
            raise DomainError(f"ratio bounds need log r > 0, got s_lo = {s_lo!r}")
        return self._closed_ratio_log(s_lo)

    def _closed_weak_log(self, s, beta):
        return (beta - 1.0) * s - 0.75 * math.log(s)

    def log_weak_curvature_sup(self, s_lo, s_hi, beta):
        if not (s_lo > 0.0):
            raise DomainError(f"ratio bounds need log r > 0, got s_lo = {s_lo!r}")
        if beta > 1.0 and not math.isfinite(s_hi):
            return math.inf
        return max(self._closed_weak_log(s_lo, beta), self._closed_weak_log(min(s_hi, 1e308), beta))

    def describe(self):
        return {"kind": self.kind, "n": self.n, "validity_radius": self.validity_radius}


class ExponentialSymbol(DispersionSymbol):
    """phi = exp(mu(omega) r**beta) with mu bounded away from zero.

    mu may be a positive constant or a callable on directions with declared
    bounds 0 < mu_lo <= mu <= mu_hi. Slopes overflow binary64 already at
    moderate radii, so every bound here works in the log domain with
    conservative clipping.
    """

    kind = "exponential"
    slope_floor_nondecreasing = True

    def __init__(self, beta, mu=1.0, n=1, validity_radius=2.0, mu_lo=None, mu_hi=None):
        super().__init__(n, validity_radius)
        if not (beta > 0.0) or not math.isfinite(beta):
            raise InputError(f"exponent beta must be positive and finite, got {beta}")
        self.beta = float(beta)
        if callable(mu):
            if mu_lo is None or mu_hi is None:
                raise InputError("callable mu needs declared mu_lo and mu_hi bounds")
            if not (0.0 < mu_lo <= mu_hi) or not math.isfinite(mu_hi):
                raise InputError(f"need 0 < mu_lo <= mu_hi finite, got ({mu_lo}, {mu_hi})")
            self.mu = mu
            self.mu_lo = float(mu_lo)
            self.mu_hi = float(mu_hi)
        else:
            mu = float(mu)
            if not (mu > 0.0) or not math.isfinite(mu):
                raise InputError(f"mu must be positive and finite, got {mu}")
            self.mu = mu
            self.mu_lo = mu
            self.mu_hi = mu

    def _mu_of(self, w):
        return self.mu(w) if callable(self.mu) else self.mu

    def _phi(self, r, w):
        return np.exp(self._mu_of(w) * r**self.beta)

    def _phi_dr(self, r, w):
        m = self._mu_of(w)
        return m * self.beta * r ** (self.beta - 1.0) * np.exp(m * r**self.beta)

    def _phi_drr(self, r, w):
        m = self._mu_of(w)
        rb = r**self.beta
        return m * self.beta * r ** (self.beta - 2.0) * np.exp(m * rb) * (self.beta - 1.0 + m * self.beta * rb)

    def _log_slope(self, s, m):
        grow = m * math.exp(min(self.beta * s, LOG_CLIP))
        return math.log(m * self.beta) + (self.beta - 1.0) * s + min(grow, 1e290)

    def log_slope_at(self, s, omega):
        return self._log_slope(s, self._mu_of(_check_omega(omega, self.n)))

    def log_slope_floor(self, s):
        return self._log_slope(s, self.mu_lo)

    def log_phi_mag(self, s):
        return min(self.mu_hi * math.exp(min(self.beta * s, LOG_CLIP)), 1e290)

    def clearing_log_radius(self, log_threshold, s_max=710.0):
        lo = math.log(self.validity_radius + 1e-9)
        if self.log_slope_floor(lo) > log_threshold:
            return lo
        hi = s_max
        if self.log_slope_floor(hi) <= log_threshold:
            return math.inf
        while hi - lo > 1e-12 * max(1.0, abs(hi)):
            mid = 0.5 * (lo + hi)
            if self.log_slope_floor(mid) > log_threshold:
                hi = mid
            else:
                lo = mid
        return hi

    def _closed_ratio_log(self, s, m):
        # ratio = r phi'' / (phi'^2 s^{3/4})
        #       = (beta - 1 + m beta e^{beta s}) e^{-(beta-1)s}
        #         / (m beta e^{m e^{beta s}} s^{3/4})
        # The e^{m e^{beta s}} denominator crushes everything else, so the
        # value is astronomically small as soon as s is moderate.
        eb = math.exp(min(self.beta * s, LOG_CLIP))
        inner = self.beta - 1.0 + m * self.beta * eb
        if inner <= 0.0:
            return -math.inf
        return (
            math.log(inner)
            - (self.beta - 1.0) * s
            - math.log(m * self.beta)
            - min(m * eb, 1e290)
            - 0.75 * math.log(s)
        )

    def log_curvature_ratio_sup(self, s_lo, s_hi):
        if not (s_lo > 0.0):
            raise DomainError(f"ratio bounds need log r > 0, got s_lo = {s_lo!r}")
        # decreasing in s once m beta e^{beta s} > beta, and decreasing in
        # m, so the inner endpoint with the smallest mu dominates; sample a
        # short grid anyway to cover small s_lo
        grid = np.linspace(s_lo, min(s_hi, s_lo + 5.0), 16)
        return max(self._closed_ratio_log(float(s), self.mu_lo) for s in grid)

    def log_weak_curvature_sup(self, s_lo, s_hi, beta):
        # r^beta phi'' explodes doubly exponentially; never finite over an
        # unbounded range and useless on bounded ones
        return math.inf

    def describe(self):
        if callable(self.mu):
            raise InputError("exponential symbol with callable mu is not serializable")
        return {
            "kind": self.kind,
            "beta": self.beta,
            "mu": self.mu,
            "n": self.n,
            "validity_radius": self.validity_radius,
        }


class HomogeneousSumSymbol(DispersionSymbol):
    """phi = sum_i c_i(omega) r**a_i with distinct degrees.

    Each term is (degree, profile, inf_abs, sup_abs) where profile maps a
    unit direction to a coefficient and the two declared numbers bound its
    absolute value on the sphere. The top-degree coefficient must be
    bounded away from zero, otherwise no slope floor exists.
    """

    kind = "homogeneous-sum"
    slope_floor_nondecreasing = True

    def __init__(self, terms, n=1, validity_radius=2.0):
        super().__init__(n, validity_radius)
        cooked = []
        for item in terms:
            a, profile, lo, hi = item
            a = float(a)
            if not (a > 0.0) or not math.isfinite(a):
                raise InputError(f"term degree must be positive and finite, got {a}")
            if not callable(profile):
                raise InputError("term profile must be callable on directions")
            if not (0.0 <= lo <= hi) or not math.isfinite(hi):
                raise InputError(f"need 0 <= inf_abs <= sup_abs finite, got ({lo}, {hi})")
            cooked.append((a, profile, float(lo), float(hi)))
        if not cooked:
            raise InputError("homogeneous sum needs at least one term")
        cooked.sort(key=lambda t: -t[0])
        degrees = [t[0] for t in cooked]
        if len(set(degrees)) != len(degrees):
            raise InputError(f"term degrees must be distinct, got {degrees}")
        if cooked[0][2] <= 0.0:
            raise InputError("top-degree coefficient needs a positive declared lower bound")
        self.terms = tuple(cooked)

    def _coeffs(self, w):
        return [p(w) for (_, p, _, _) in self.terms]

    def _phi(self, r, w):
        out = np.zeros_like(np.asarray(r, dtype=float))
        for (a, _, _, _), c in zip(self.terms, self._coeffs(w)):
            out = out + c * r**a
        return out

    def _phi_dr(self, r, w):
        out = np.zeros_like(np.asarray(r, dtype=float))
        for (a, _, _, _), c in zip(self.terms, self._coeffs(w)):
            out = out + c * a * r ** (a - 1.0)
        return out

    def _phi_drr(self, r, w):
        out = np.zeros_like(np.asarray(r, dtype=float))
        for (a, _, _, _), c in zip(self.terms, self._coeffs(w)):
            out = out + c * a * (a - 1.0) * r ** (a - 2.0)
        return out

    def log_slope_at(self, s, omega):
        w = _check_omega(omega, self.n)
        a0, _, _, _ = self.terms[0]
        coeffs = self._coeffs(w)
        lead = a0 * coeffs[0]
        if lead == 0.0:
            return super().log_slope_at(s, omega)
        # factor out the dominant term so huge s never overflows
        corr = 1.0
        for (a, _, _, _), c in zip(self.terms[1:], coeffs[1:]):
            corr += (a * c / lead) * math.exp(min((a - a0) * s, 0.0) if a < a0 else (a - a0) * s)
        if corr <= 0.0:
            return -math.inf
        return math.log(abs(lead)) + (a0 - 1.0) * s + math.log(corr)

    def _slack_at(self, s):
        a0, _, lo0, _ = self.terms[0]
        slack = 0.0
        for a, _, _, hi in self.terms[1:]:
            slack += (a * hi) / (a0 * lo0) * math.exp((a - a0) * s)
        return slack

    def log_slope_floor(self, s):
        a0, _, lo0, _ = self.terms[0]
        slack = self._slack_at(s)
        if slack < 0.5:
            return math.log(a0 * lo0) + (a0 - 1.0) * s + math.log1p(-slack)
        # lower-order terms too strong for the declared-bound argument;
        # fall back to the grid minimum, only valid at representable radii
        if (a0 - 1.0) * s > LOG_CLIP:
            return -math.inf
        dirs, _ = angular_grid(self.n)
        return min(self.log_slope_at(s, d) for d in dirs)

    def log_phi_mag(self, s):
        parts = [math.log(hi) + a * s for (a, _, _, hi) in self.terms if hi > 0.0]
        if not parts:
            return -math.inf
        top = max(parts)
        return top + math.log(sum(math.exp(p - top) for p in parts))

    def clearing_log_radius(self, log_threshold, s_max=710.0):
        lo = math.log(self.validity_radius + 1e-9)
        if self.log_slope_floor(lo) > log_threshold:
            return lo
        hi = s_max
        if self.log_slope_floor(hi) <= log_threshold:
            return math.inf
        while hi - lo > 1e-12 * max(1.0, abs(hi)):
            mid = 0.5 * (lo + hi)
            if self.log_slope_floor(mid) > log_threshold:
                hi = mid
            else:
                lo = mid
        return hi

    def log_curvature_ratio_sup(self, s_lo, s_hi):
        # closed-form sup for a general sum is messy; past the point where
        # the dominant term carries 2/3 of the slope floor, bound the ratio
        # by the dominant-term ratio inflated by the slack factors, and
        # before that point use the sampled grid
        if not (s_lo > 0.0):
            raise DomainError(f"ratio bounds need log r > 0, got s_lo = {s_lo!r}")
        a0, _, lo0, _ = self.terms[0]
        curv_top = 0.0
        for a, _, _, hi in self.terms:
            curv_top = max(curv_top, math.log(max(a * abs(a - 1.0) * hi, 1e-300)) + 0.0)
        split = min(s_hi, max(s_lo + 1.0, 60.0))
        best = self._grid_ratio_sup(s_lo, split, self._log_ratio_node)
        if s_hi > split:
            s = split
            slack = self._slack_at(s)
            if slack >= 0.5:
                return math.inf
            # |phi''| <= sum a|a-1| hi r^{a-2} <= (sum coeffs) r^{a0-2},
            # phi' >= a0 lo0 (1-slack) r^{a0-1}; both one-sided in s >= split
            num = sum(a * abs(a - 1.0) * hi for a, _, _, hi in self.terms)
            tail = (
                math.log(max(num, 1e-300))
                - 2.0 * math.log(a0 * lo0 * (1.0 - slack))
                + (1.0 - a0) * s
                - 0.75 * math.log(s)
            )
            best = max(best, tail)
        return best

    def log_weak_curvature_sup(self, s_lo, s_hi, beta):
        if not (s_lo > 0.0):
            raise DomainError(f"ratio bounds need log r > 0, got s_lo = {s_lo!r}")
        a0 = self.terms[0][0]
        if beta + a0 - 2.0 > 0.0 and not math.isfinite(s_hi):
            return math.inf
        split = min(s_hi, max(s_lo + 1.0, 60.0))
        best = self._grid_ratio_sup(s_lo, split, lambda s, w: self._log_weak_node(s, w, beta))
        if s_hi > split:
            num = sum(a * abs(a - 1.0) * hi for a, _, _, hi in self.terms)
            for s in (split, min(s_hi, 1e308)):
                best = max(
                    best,
                    math.log(max(num, 1e-300)) + (beta + a0 - 2.0) * s - 0.75 * math.log(s),
                )
        return best


class UserSymbol(DispersionSymbol):
    """Symbol given by three callables (r, omega) -> value, vectorized
    over r. Log-domain bounds fall back to grid sampling on representable
    radii, so schedules built on a user symbol stay trustworthy only while
    their radii are representable."""

    kind = "user"

    def __init__(self, phi, phi_dr, phi_drr, n=1, validity_radius=2.0,
                 slope_floor_nondecreasing=False):
        super().__init__(n, validity_radius)
        for f in (phi, phi_dr, phi_drr):
            if not callable(f):
                raise InputError("user symbol needs three callables")
        self._fn = phi
        self._fn_dr = phi_dr
        self._fn_drr = phi_drr
        self.slope_floor_nondecreasing = bool(slope_floor_nondecreasing)

    def _phi(self, r, w):
        return self._fn(r, w)

    def _phi_dr(self, r, w):
        return self._fn_dr(r, w)

    def _phi_drr(self, r, w):
        return self._fn_drr(r, w)


def homogeneous(a, n=1, validity_radius=2.0):
    return HomogeneousSymbol(a, n=n, validity_radius=validity_radius)


def homogeneous_sum(terms, n=1, validity_radius=2.0):
    return HomogeneousSumSymbol(terms, n=n, validity_radius=validity_radius)


def r_log_r(n=1, validity_radius=2.0):
    return RLogRSymbol(n=n, validity_radius=validity_radius)


def exponential(beta, mu=1.0, n=1, validity_radius=2.0, mu_lo=None, mu_hi=None):
    return ExponentialSymbol(beta, mu=mu, n=n, validity_radius=validity_radius,
                             mu_lo=mu_lo, mu_hi=mu_hi)


def user_symbol(phi, phi_dr, phi_drr, n=1, validity_radius=2.0,
                slope_floor_nondecreasing=False):
    return UserSymbol(phi, phi_dr, phi_drr, n=n, validity_radius=validity_radius,
                      slope_floor_nondecreasing=slope_floor_nondecreasing)


def symbol_from_description(desc):
    """Inverse of describe() for the serializable kinds."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise InputError(f"not a symbol description: {desc!r}")
    d = dict(desc)
    kind = d.pop("kind")
    try:
        if kind == "homogeneous":
            sym = HomogeneousSymbol(d.pop("a"), n=d.pop("n", 1),
                                    validity_radius=d.pop("validity_radius", 2.0))
        elif kind == "rlogr":
            sym = RLogRSymbol(n=d.pop("n", 1), validity_radius=d.pop("validity_radius", 2.0))
        elif kind == "exponential":
            sym = ExponentialSymbol(d.pop("beta"), mu=d.pop("mu", 1.0), n=d.pop("n", 1),
                                    validity_radius=d.pop("validity_radius", 2.0))
        else:
            raise InputError(f"unknown symbol kind {kind!r}")
    except KeyError as exc:
        raise InputError(f"symbol description missing field {exc}") from None
    if d:
        raise InputError(f"unknown symbol description fields {sorted(d)}")
    return sym


@dataclass(frozen=True)
class ConditionReport:
    """Measured growth behavior of a symbol on a finite grid.

    Verdicts name which certified-enclosure families the symbol supports:
    "theorem1" needs an unboundedly growing slope with a finite curvature
    ratio, "theorem2-strong" needs a positive slope floor with the same
    ratio, "theorem2-weak" trades the ratio for a power-weighted curvature
    bound at a given exponent.
    """

    kind: str
    n: int
    r_lo: float
    r_max: float
    radial_points: int
    angular_points: int
    growth_threshold: float
    grows_unboundedly: bool
    min_slope_low_decade: float
    min_slope_high_decade: float
    slope_floor: float
    curvature_ratio_bound: float
    curvature_power_bound: float | None
    beta: float | None
    verdicts: tuple[str, ...]

    def supports(self, variant):
        return variant in self.verdicts

    def to_dict(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "r_lo": self.r_lo,
            "r_max": self.r_max,
            "radial_points": self.radial_points,
            "angular_points": self.angular_points,
            "growth_threshold": self.growth_threshold,
            "grows_unboundedly": self.grows_unboundedly,
            "min_slope_low_decade": _json_real(self.min_slope_low_decade),
            "min_slope_high_decade": _json_real(self.min_slope_high_decade),
            "slope_floor": _json_real(self.slope_floor),
            "curvature_ratio_bound": _json_real(self.curvature_ratio_bound),
            "curvature_power_bound": (
                None if self.curvature_power_bound is None
                else _json_real(self.curvature_power_bound)
            ),
            "beta": self.beta,
            "verdicts": list(self.verdicts),
        }


def _json_real(x):
    return repr(float(x))


def verify_growth_conditions(sym, r_max=1e6, radial_points=64,
                             growth_threshold=10.0, beta=None):
    """Check the slope and curvature conditions on a geometric radial grid
    crossed with the default angular grid.

    The slope "grows unboundedly" when its minimum over the top decade of
    the grid exceeds both twice the bottom-decade minimum and the absolute
    threshold. That is a judgment call on a finite window, not a proof;
    the grid and threshold are reported so the judgment is reproducible.
    """
    r_lo = sym.validity_radius + 1.0
    if not (r_max >= 10.0 * r_lo):
        raise DomainError(
            f"r_max = {r_max!r} is under one decade above the validity "
            f"radius; the growth judgment needs at least 10 * {r_lo!r}"
        )
    if radial_points < 16:
        raise InputError(f"need at least 16 radial points, got {radial_points}")

    s_grid = np.linspace(math.log(r_lo), math.log(r_max), radial_points)
    # curvature nodes carry the s^{-3/4} amplitude weight, which blows up
    # toward r = 1; annuli never start below radius 2, so sample the
    # curvature sups from there on
    s_curv_lo = max(float(s_grid[0]), math.log(2.0))
    dirs, _ = angular_grid(sym.n)

    log_slopes = np.empty((len(dirs), radial_points))
    log_ratio = np.full((len(dirs), radial_points), -np.inf)
    log_weak = np.full((len(dirs), radial_points), -np.inf)
    for i, w in enumerate(dirs):
        for jj, s in enumerate(s_grid):
            s = float(s)
            try:
                log_slopes[i, jj] = sym.log_slope_at(s, w)
                if s >= s_curv_lo:
                    log_ratio[i, jj] = sym._log_ratio_node(s, w)
                    if beta is not None:
                        log_weak[i, jj] = sym._log_weak_node(s, w, beta)
            except Exception as exc:
                raise DomainError(
                    f"symbol evaluation failed at r = {math.exp(s)!r}, "
                    f"omega = {w.tolist()!r}: {exc}"
                ) from exc

    floor_per_s = log_slopes.min(axis=0)
    s_lo, s_hi = float(s_grid[0]), float(s_grid[-1])
    ln10 = math.log(10.0)
    low = floor_per_s[s_grid <= s_lo + ln10]
    high = floor_per_s[s_grid >= s_hi - ln10]
    m_lo = float(low.min())
    m_hi = float(high.min())

    grows = (m_hi > math.log(2.0) + m_lo) and (m_hi > math.log(growth_threshold))
    slope_floor = math.exp(min(float(floor_per_s.min()), LOG_CLIP)) if np.isfinite(floor_per_s.min()) else 0.0

    ratio_log = float(log_ratio.max())
    ratio = math.exp(ratio_log) if ratio_log < LOG_CLIP else math.inf

    weak = None
    if beta is not None:
        weak_log = float(log_weak.max())
        weak = math.exp(weak_log) if weak_log < LOG_CLIP else math.inf

    if sym.kind == "homogeneous-sum":
        # declared bound on the dominant coefficient must agree with the grid
        a0, profile, lo0, _ = sym.terms[0]
        sampled = min(abs(float(profile(w))) for w in dirs)
        if sampled <= 0.0 or sampled < lo0 * (1.0 - 1e-6):
            grows = False
            slope_floor = 0.0

    verdicts = []
    if grows and math.isfinite(ratio):
        verdicts.append("theorem1")
    if slope_floor > 0.0 and math.isfinite(ratio):
        verdicts.append("theorem2-strong")
    if slope_floor > 0.0 and weak is not None and math.isfinite(weak):
        verdicts.append("theorem2-weak")

    def _lin(v):
        return math.exp(v) if v < LOG_CLIP else math.inf

    return ConditionReport(
        kind=sym.kind,
        n=sym.n,
        r_lo=r_lo,
        r_max=float(r_max),
        radial_points=int(radial_points),
        angular_points=len(dirs),
        growth_threshold=float(growth_threshold),
        grows_unboundedly=bool(grows),
        min_slope_low_decade=_lin(m_lo),
        min_slope_high_decade=_lin(m_hi),
        slope_floor=slope_floor,
        curvature_ratio_bound=ratio,
        curvature_power_bound=weak,
        beta=None if beta is None else float(beta),
        verdicts=tuple(verdicts),
    )
