"""Partial sums, blow-up certificates and uniform tail bounds.

The certified lower bound at the k-th scheduled target is assembled as

    L_k = diagonal_k - below_sum_bound_k - tail_bound_k,

with the diagonal exact in closed form, the below-sum controlled by the
absolute-amplitude antiderivative through the previous outer radius, and
the tail summed from per-term enclosures. Dividing by (log R'_k)^{1/4}
gives the growth ratio whose positive floor across k is the finite-index
content of the divergence result.

Everything k-indexed here uses annulus indices (1-based); on full
single-target-per-point schedules these coincide with point indices.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError
from .ioutil import atomic_write_text
from .oscint import (Enclosure, compute_term, diagonal_term_exact,
                     estimated_log_variation, quarter_power, term_enclosure,
                     term_enclosure_at, uniform_chain_log)
from .symbol import sphere_measure

TWO_PI = 2.0 * math.pi

CERTIFICATES_FORMAT = "divcert.certificates/1"

# above this estimated phase variation, binary64 phase evaluation has
# lost whole radians and a computed |S| column value would be noise
VALUE_TRUST_LOG_VARIATION = math.log(1e12)


@dataclass(frozen=True)
class PartialSum:
    m: int
    target_x: np.ndarray
    target_t: float
    value: complex
    abs_error: float
    per_term: tuple

    @property
    def terms_evaluated(self):
        return sum(1 for t in self.per_term if not isinstance(t, Enclosure))

    @property
    def terms_bounded(self):
        return sum(1 for t in self.per_term if isinstance(t, Enclosure))


def partial_sum(sched, m, target, tol=1e-8):
    """Sum of terms 1..m at the target, ascending j.

    Representable terms are evaluated; log-only terms contribute zero to
    the value and their enclosure bound to the error, and appear in
    per_term as the Enclosure itself so the substitution is visible."""
    if not sched.has_annuli:
        raise InputError("schedule has no annuli")
    if not (1 <= m <= sched.annulus_count):
        raise InputError(f"truncation index {m} outside 1..{sched.annulus_count}")

    from .oscint import resolve_target

    x, t, k = resolve_target(sched, target)
    value = 0.0 + 0.0j
    err = 0.0
    per_term = []
    for j in range(1, m + 1):
        try:
            zero_phase = k == j or (
                k is None and t == sched.annulus_target(j)[1]
                and np.array_equal(x, sched.annulus_target(j)[0]))
            if sched.is_log_only(j) and not zero_phase:
                if k is not None and k != j:
                    enc = term_enclosure(sched, j, k)
                else:
                    enc = term_enclosure_at(sched, j, x, t)
                per_term.append(enc)
                err += enc.bound
                continue
            term = compute_term(sched, j, target, tol=tol)
            per_term.append(term)
            value += term.value
            err += term.abs_error
        except Exception as exc:
            raise type(exc)(f"term {j}: {exc}") from exc
    return PartialSum(m=m, target_x=x, target_t=t, value=value,
                      abs_error=err, per_term=tuple(per_term))


@dataclass(frozen=True)
class BlowupCertificate:
    k: int
    t_k: float
    log_Rp_k: float
    llog_Rp_k: float
    diagonal: float
    below_sum_bound: float
    tail_bound: float
    tail_log_bound: float
    lower_bound: float
    growth_ratio: float
    enclosures: tuple

    def to_dict(self, full_enclosures=True, leading=8):
        chains = {}
        for enc in self.enclosures:
            chains[enc.chain] = chains.get(enc.chain, 0) + 1
        d = {
            "k": self.k,
            "t_k": repr(self.t_k),
            "log_Rp_k": repr(self.log_Rp_k),
            "llog_Rp_k": repr(self.llog_Rp_k),
            "diagonal": repr(self.diagonal),
            "below_sum_bound": repr(self.below_sum_bound),
            "tail_bound": repr(self.tail_bound),
            "tail_log_bound": repr(self.tail_log_bound),
            "lower_bound": repr(self.lower_bound),
            "growth_ratio": repr(self.growth_ratio),
            "chain_counts": chains,
        }
        encs = self.enclosures if full_enclosures else self.enclosures[:leading]
        d["enclosures"] = [enc.to_dict() for enc in encs]
        return d


def blowup_certificate(sched, k):
    """Certified L_k at the k-th scheduled target.

    below_sum_bound is the exact antiderivative bound through the
    previous outer radius (zero for k = 1, the empty sum); the tail sums
    term_enclosure over j > k in ascending order. L_k may come out
    negative for undersized radius exponents, and is reported as is."""
    if not sched.has_annuli:
        raise InputError("schedule has no annuli")
    J = sched.annulus_count
    if not (1 <= k <= J):
        raise InputError(f"annulus index {k} outside 1..{J}")

    prefac = sphere_measure(sched.n) / TWO_PI**sched.n
    diagonal = diagonal_term_exact(sched, k)
    if k == 1:
        below = 0.0
    else:
        _, lrp_prev = sched.log_radii(k - 1)
        _, llrp_prev = sched.llog_radii(k - 1)
        below = prefac * 4.0 * quarter_power(lrp_prev, llrp_prev)

    encs = []
    tail_log = -math.inf
    tail = 0.0
    for j in range(k + 1, J + 1):
        enc = term_enclosure(sched, j, k)
        encs.append(enc)
        tail_log = float(np.logaddexp(tail_log, enc.log_bound))
        tail += enc.bound

    lrp, llrp = sched.log_radii(k)[1], sched.llog_radii(k)[1]
    L = diagonal - below - tail
    ratio = L / quarter_power(lrp, llrp)
    return BlowupCertificate(
        k=k, t_k=sched.annulus_target(k)[1],
        log_Rp_k=lrp, llog_Rp_k=llrp,
        diagonal=diagonal, below_sum_bound=below,
        tail_bound=tail, tail_log_bound=tail_log,
        lower_bound=L, growth_ratio=ratio,
        enclosures=tuple(encs),
    )


def _value_computable(sched, k):
    """Whether |S f| at target k can honestly be written down: every
    off-diagonal term must either be evaluable with trustworthy phases
    or be a log-only term lying above k (tiny bounded contribution)."""
    for j in range(1, sched.annulus_count + 1):
        if j == k:
            continue
        x_k, t_k = sched.annulus_target(k)
        if sched.is_log_only(j):
            if j > k:
                continue
            return False
        if estimated_log_variation(sched, j, x_k, t_k) > VALUE_TRUST_LOG_VARIATION:
            return False
    return True


def blowup_table(sched, ks=None, tol=1e-8):
    """Certificates plus CSV-ready rows for the requested targets
    (default: all). Returns (rows, certificates); the abs_S / abs_err
    columns are filled only when the full sum is honestly computable."""
    J = sched.annulus_count
    if ks is None:
        ks = range(1, J + 1)
    ks = [int(k) for k in ks]
    if ks != sorted(ks):
        raise InputError("target indices must ascend")

    rows = []
    certs = []
    for k in ks:
        cert = blowup_certificate(sched, k)
        certs.append(cert)
        abs_S = abs_err = None
        if _value_computable(sched, k):
            ps = partial_sum(sched, J, k, tol=tol)
            abs_S = abs(ps.value)
            abs_err = ps.abs_error
        rows.append({
            "k": k,
            "t_k": cert.t_k,
            "log_Rp_k": cert.log_Rp_k,
            "L_k": cert.lower_bound,
            "growth_ratio": cert.growth_ratio,
            "abs_S": abs_S,
            "abs_err": abs_err,
        })
    return rows, certs


CSV_HEADER = ["k", "t_k", "log_Rp_k", "L_k", "growth_ratio", "abs_S", "abs_err"]


def write_blowup_csv(path, rows):
    """Shortest-repr reals so the table round-trips bit-exactly; empty
    cells where no honest value exists."""
    lines = [",".join(CSV_HEADER)]
    for row in rows:
        cells = [str(int(row["k"]))]
        for key in CSV_HEADER[1:]:
            v = row[key]
            cells.append("" if v is None else repr(float(v)))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_blowup_csv(path):
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != CSV_HEADER:
            raise InputError(f"unexpected CSV header {reader.fieldnames}")
        for rec in reader:
            rows.append({
                "k": int(rec["k"]),
                **{key: (None if rec[key] == "" else float(rec[key]))
                   for key in CSV_HEADER[1:]},
            })
    return rows


def certificates_c0(certs):
    """The single growth-ratio floor across k >= 2, or None when no such
    certificate is present."""
    ratios = [c.growth_ratio for c in certs if c.k >= 2]
    return min(ratios) if ratios else None


def certificates_doc(sched, certs):
    c0 = certificates_c0(certs)
    full = sched.annulus_count <= 64
    return {
        "format": CERTIFICATES_FORMAT,
        "variant": sched.variant,
        "n": sched.n,
        "K": sched.K,
        "N": sched.N,
        "annulus_count": sched.annulus_count,
        "c0": None if c0 is None else repr(c0),
        "rows": [c.to_dict(full_enclosures=full) for c in certs],
    }


def write_certificates_json(path, sched, certs):
    atomic_write_text(path, json.dumps(certificates_doc(sched, certs),
                                       indent=1, sort_keys=True) + "\n")


def continuity_tail_bound(sched, m, t_min, x_max):
    """Upper bound for the tail above truncation m, valid simultaneously
    at every scheduled target with index <= m inside the box
    {t >= t_min, |x| <= x_max}, via the j-free geometric chain.

    Exactly zero at m = annulus_count (empty sum). Enlarging the box
    (smaller t_min, larger x_max) never shrinks the bound: the
    unbounded-slope and bounded-curvature chains do not see the box at
    all, and narrowing the weak chain's width floor only grows it."""
    if not sched.has_annuli:
        raise InputError("schedule has no annuli")
    if not (t_min > 0.0):
        raise DomainError(f"box time floor must be positive, got {t_min!r}")
    if not (x_max >= 0.0):
        raise InputError(f"box radius must be nonnegative, got {x_max!r}")
    J = sched.annulus_count
    if not (0 <= m <= J):
        raise InputError(f"truncation index {m} outside 0..{J}")
    if m == J:
        return 0.0

    eta_floor = None
    if sched.variant == "theorem2-weak":
        tau = min(float(t_min), float(sched.times[0]))
        eta_floor = sched.eta(tau)

    prefac_log = math.log(sphere_measure(sched.n)) - sched.n * math.log(TWO_PI)
    total_log = -math.inf
    for j in range(m + 1, J + 1):
        b_log, i_log = uniform_chain_log(sched, j, eta_k=eta_floor)
        total_log = float(np.logaddexp(total_log,
                                       prefac_log + np.logaddexp(b_log, i_log)))
    return math.exp(total_log) if total_log < 700.0 else math.inf
