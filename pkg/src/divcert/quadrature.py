"""Quadrature engines.

Three layers, all returning (value, abs_error_estimate, eval_count):

  integrate_adaptive    batched adaptive Gauss-Kronrod (7,15) for smooth
                        or presplit integrands
  integrate_oscillatory direct evaluation of amplitude * exp(i*phase)
                        with an equal-phase-variation initial split
  integrate_levin       collocation solution of p' + i*G*p = w on
                        Chebyshev segments, turning the oscillatory
                        integral of w*exp(i*F) into boundary differences
                        p*exp(i*F); cost independent of how fast F turns
  angular_integrate     surface integral over the unit sphere for
                        n in {1,2,3} with node doubling until stable

Error estimates are numerical (rule differences and refinement changes),
not certified bounds. Certified bounds live with the enclosure code.
"""

from __future__ import annotations

import heapq
import math
from functools import lru_cache

import numpy as np

from .errors import BudgetError, InputError, RegimeError

# Gauss-Kronrod (7,15) abscissae and weights on [-1, 1], ascending.
# The embedded 7-point Gauss rule sits on the odd indices.
_K15_NODES = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_K15_WEIGHTS = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_G7_WEIGHTS = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870,
])


def _gk_eval(f, lo, hi):
    """Apply the (7,15) pair on a batch of intervals. lo, hi: (m,) arrays.
    Returns per-interval Kronrod values and |K - G| error estimates."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * _K15_NODES[None, :]
    vals = np.asarray(f(pts.ravel())).reshape(len(lo), 15)
    k = (vals * _K15_WEIGHTS).sum(axis=1) * half
    g = (vals[:, 1::2] * _G7_WEIGHTS).sum(axis=1) * half
    return k, np.abs(k - g)


def integrate_adaptive(f, a, b, tol, max_evals=2_000_000, presplit=None):
    """Adaptive Gauss-Kronrod integration of a vectorized complex-valued
    f over [a, b] to absolute tolerance tol.

    presplit, when given, is a sorted array of initial interval
    boundaries including both endpoints. Intervals are refined worst
    first in batches. Exceeding max_evals raises BudgetError carrying the
    best value and achieved error.
    """
    if not (b > a):
        raise InputError(f"empty integration range [{a}, {b}]")
    if presplit is None:
        bounds = np.array([a, b])
    else:
        bounds = np.asarray(presplit, dtype=float)
        if bounds[0] != a or bounds[-1] != b or not np.all(np.diff(bounds) > 0):
            raise InputError("presplit boundaries must ascend from a to b")

    lo = bounds[:-1]
    hi = bounds[1:]
    vals, errs = _gk_eval(f, lo, hi)
    evals = 15 * len(lo)

    # heap of (-err, left, right, value); ties broken by interval position
    heap = [(-errs[i], lo[i], hi[i], vals[i]) for i in range(len(lo))]
    heapq.heapify(heap)

    def totals():
        segs = sorted(heap, key=lambda it: it[1])
        return (sum(it[3] for it in segs),
                sum(-it[0] for it in segs))

    while True:
        value, err = totals()
        if err <= tol:
            return value, err, evals
        if evals >= max_evals:
            raise BudgetError(
                f"adaptive quadrature exhausted {evals} evaluations at "
                f"error {err:.3e} (tolerance {tol:.3e})",
                value=value, abs_error=err,
            )
        batch = []
        for _ in range(min(64, len(heap))):
            batch.append(heapq.heappop(heap))
            if -batch[-1][0] <= tol / max(1, 4 * (len(heap) + len(batch))):
                break
        left = np.array([it[1] for it in batch])
        right = np.array([it[2] for it in batch])
        mids = 0.5 * (left + right)
        clo = np.concatenate([left, mids])
        chi = np.concatenate([mids, right])
        cva, cer = _gk_eval(f, clo, chi)
        evals += 15 * len(clo)
        for i in range(len(clo)):
            heapq.heappush(heap, (-cer[i], clo[i], chi[i], cva[i]))


def phase_variation(phase, a, b, probes=257):
    """Total variation of the phase on a uniform probe grid; a cheap
    upper-bound proxy used for regime routing and initial splitting."""
    s = np.linspace(a, b, probes)
    F = np.asarray(phase(s), dtype=float)
    return float(np.abs(np.diff(F)).sum()), s, F


def integrate_oscillatory(amplitude, phase, a, b, tol, variation_cap=1e6,
                          max_evals=2_000_000, rad_per_interval=3.0):
    """Direct quadrature of amplitude(s) * exp(i*phase(s)) on [a, b].

    The initial split equalizes probed phase variation so each interval
    turns through at most rad_per_interval radians, keeping 15 Kronrod
    nodes comfortably above 10 per oscillation. Refinement then follows
    the usual error-driven bisection.
    """
    var, grid, F = phase_variation(phase, a, b)
    if var > variation_cap:
        raise RegimeError(
            f"probed phase variation {var:.3e} exceeds the direct cap "
            f"{variation_cap:.3e}; use the boundary-split path"
        )
    pieces = int(min(max(math.ceil(var / rad_per_interval), 4), 100_000))
    cum = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(F)))])
    if cum[-1] > 0.0:
        targets = np.linspace(0.0, cum[-1], pieces + 1)[1:-1]
        cuts = np.interp(targets, cum, grid)
        bounds = np.unique(np.concatenate([[a], cuts, [b]]))
    else:
        bounds = np.linspace(a, b, pieces + 1)

    def f(s):
        return np.asarray(amplitude(s)) * np.exp(1j * np.asarray(phase(s)))

    return integrate_adaptive(f, a, b, tol, max_evals=max_evals, presplit=bounds)


# -- Levin-type collocation ----------------------------------------------


@lru_cache(maxsize=16)
def _cheb(nn):
    """Chebyshev-Lobatto differentiation matrix on nn+1 points, nodes
    descending from +1 to -1 (Trefethen's construction)."""
    x = np.cos(np.pi * np.arange(nn + 1) / nn)
    c = np.ones(nn + 1)
    c[0] = 2.0
    c[-1] = 2.0
    c = c * (-1.0) ** np.arange(nn + 1)
    X = np.tile(x, (nn + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(nn + 1))
    D = D - np.diag(D.sum(axis=1))
    return D, x

_LEVIN_COARSE = 12
_LEVIN_FINE = 18


def _levin_segment(slope, rhs, lo, hi, nn):
    """Collocation solution of p'(s) + i*slope(s)*p(s) = rhs(s) on
    [lo, hi]; returns (p(lo), p(hi), nodes_used). Least-squares accepts
    the singular slope == 0 case, where any antiderivative gives the same
    boundary difference."""
    D, x = _cheb(nn)
    half = 0.5 * (hi - lo)
    s = 0.5 * (hi + lo) + half * x  # descending: s[0] = hi, s[-1] = lo
    A = D / half + 1j * np.diag(np.asarray(slope(s), dtype=float))
    w = np.asarray(rhs(s), dtype=complex)
    p, *_ = np.linalg.lstsq(A, w, rcond=None)
    return p[-1], p[0], nn + 1


def _levin_piece(slope, rhs, phase, lo, hi):
    """One segment evaluated at two resolutions; value from the finer,
    error from their difference."""
    F_ends = np.asarray(phase(np.array([lo, hi])), dtype=float)
    e_lo = np.exp(1j * F_ends[0])
    e_hi = np.exp(1j * F_ends[1])
    vals = []
    evals = 0
    for nn in (_LEVIN_COARSE, _LEVIN_FINE):
        p_lo, p_hi, used = _levin_segment(slope, rhs, lo, hi, nn)
        vals.append(p_hi * e_hi - p_lo * e_lo)
        evals += used
    return vals[1], abs(vals[1] - vals[0]), evals


def integrate_levin(slope, rhs, phase, a, b, tol, max_segments=256,
                    init_segments=4):
    """Oscillatory integral of rhs(s) * exp(i*phase(s)) over [a, b] where
    phase'(s) = slope(s), via segment-wise collocation.

    Node count depends on the smoothness of rhs and slope, not on how
    large slope is, which is what makes the boundary-split evaluation
    frequency-robust. Returns (value, err_estimate, eval_count); the
    error estimate is the refinement difference, not a certified bound.
    If max_segments is hit the achieved error is reported in a
    BudgetError for the caller to absorb or re-raise.
    """
    if not (b > a):
        raise InputError(f"empty integration range [{a}, {b}]")
    bounds = np.linspace(a, b, init_segments + 1)
    heap = []
    evals = 0
    for i in range(init_segments):
        v, e, used = _levin_piece(slope, rhs, phase, bounds[i], bounds[i + 1])
        evals += used
        heapq.heappush(heap, (-e, bounds[i], bounds[i + 1], v))
    segments = init_segments

    def totals():
        segs = sorted(heap, key=lambda it: it[1])
        return (sum(it[3] for it in segs),
                sum(-it[0] for it in segs))

    while True:
        value, err = totals()
        if err <= tol:
            return value, err, evals
        if segments >= max_segments:
            raise BudgetError(
                f"collocation refined to {segments} segments at error "
                f"{err:.3e} (tolerance {tol:.3e})",
                value=value, abs_error=err,
            )
        _, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        for seg in ((lo, mid), (mid, hi)):
            v, e, used = _levin_piece(slope, rhs, phase, seg[0], seg[1])
            evals += used
            heapq.heappush(heap, (-e, seg[0], seg[1], v))
        segments += 1


# -- angular integration -------------------------------------------------


def angular_integrate(f, n, tol, max_nodes=2**20, init=8):
    """Surface integral over the unit sphere of a complex integrand.

    f maps an array of directions, shape (m, n), to complex values (m,).
    n = 1 sums the two-point sphere exactly. n = 2 refines an equispaced
    trapezoid rule on the circle, reusing previous nodes at each
    doubling. n = 3 crosses Gauss-Legendre in the polar cosine with a
    trapezoid azimuth, doubling both. Returns (value, err, eval_count).
    """
    if n == 1:
        vals = np.asarray(f(np.array([[1.0], [-1.0]])))
        return complex(vals[0] + vals[1]), 0.0, 2

    if n == 2:
        m = init
        theta = 2.0 * math.pi * np.arange(m) / m
        vals = np.asarray(f(np.column_stack([np.cos(theta), np.sin(theta)])))
        evals = m
        prev = 2.0 * math.pi / m * vals.sum()
        while True:
            fresh = 2.0 * math.pi * (np.arange(m) + 0.5) / m
            new_vals = np.asarray(f(np.column_stack([np.cos(fresh), np.sin(fresh)])))
            evals += m
            m *= 2
            merged = np.empty(m, dtype=complex)
            merged[0::2] = vals
            merged[1::2] = new_vals
            vals = merged
            current = 2.0 * math.pi / m * vals.sum()
            err = abs(current - prev)
            if err <= tol:
                return complex(current), err, evals
            if evals >= max_nodes:
                raise BudgetError(
                    f"circle quadrature did not settle within {evals} nodes "
                    f"(last change {err:.3e})",
                    value=complex(current), abs_error=err,
                )
            prev = current

    if n == 3:
        m = max(4, init // 2)
        prev = None
        evals = 0
        while True:
            u, wu = np.polynomial.legendre.leggauss(m)
            theta = 2.0 * math.pi * np.arange(2 * m) / (2 * m)
            st = np.sqrt(1.0 - u**2)
            dirs = np.empty((m * 2 * m, 3))
            weights = np.empty(m * 2 * m)
            for i in range(m):
                rows = slice(i * 2 * m, (i + 1) * 2 * m)
                dirs[rows, 0] = st[i] * np.cos(theta)
                dirs[rows, 1] = st[i] * np.sin(theta)
                dirs[rows, 2] = u[i]
                weights[rows] = wu[i] * math.pi / m
            vals = np.asarray(f(dirs))
            evals += len(dirs)
            current = (weights * vals).sum()
            if prev is not None:
                err = abs(current - prev)
                if err <= tol:
                    return complex(current), err, evals
                if evals >= max_nodes:
                    raise BudgetError(
                        f"sphere quadrature did not settle within {evals} "
                        f"nodes (last change {err:.3e})",
                        value=complex(current), abs_error=err,
                    )
            prev = current
            m *= 2

    raise InputError(f"angular quadrature supports n in 1..3, got {n}")
