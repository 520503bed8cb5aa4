"""The three figure builders.

Each returns (figure, annotations) where annotations maps label names to
the exact numbers written onto the figure, so tests can hold the view
layer to the no-recomputation rule. Values are rendered with repr and
therefore match the artifact cells digit for digit.
"""

from __future__ import annotations

import math
from statistics import median

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

LN2 = math.log(2.0)


def _annotate(ax, lines):
    ax.text(0.03, 0.97, "\n".join(lines), transform=ax.transAxes,
            va="top", ha="left", fontsize=8, family="monospace",
            bbox={"boxstyle": "round", "facecolor": "white", "alpha": 0.8})


def blowup_figure(rows, c0):
    """Certified lower bounds against the quarter-power growth variable,
    with the recorded growth floor as a reference line."""
    xs = [row["log_Rp_k"] ** 0.25 for row in rows]
    ys = [row["L_k"] for row in rows]

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(xs, ys, "o", ms=4, label="certified $L_k$")
    ax.plot([xs[0], xs[-1]], [c0 * xs[0], c0 * xs[-1]], "-", lw=1,
            color="tab:red", label="$c_0 \\, (\\log R'_k)^{1/4}$")
    ax.set_xlabel("$(\\log R'_k)^{1/4}$")
    ax.set_ylabel("certified lower bound $L_k$")
    ax.legend(loc="lower right", fontsize=8)

    last = rows[-1]
    annotations = {
        "c0": c0,
        "k_last": last["k"],
        "growth_ratio_last": last["growth_ratio"],
    }
    _annotate(ax, [f"c0 = {c0!r}",
                   f"ratio at k={last['k']}: {last['growth_ratio']!r}"])
    fig.tight_layout()
    return fig, annotations


def tail_figure(k, pairs):
    """Enclosure bound decay above one target, on the log2 scale.

    The bounds routinely sit far below the smallest positive binary64,
    so the log2 values are plotted directly; a slope -1 line through the
    first point is the geometric-halving reference."""
    if len(pairs) < 2:
        raise ValueError("tail figure needs at least two enclosures")
    js = [j for j, _ in pairs]
    log2_bounds = [lb / LN2 for _, lb in pairs]

    med = median((a - b) / LN2
                 for (_, a), (_, b) in zip(pairs, pairs[1:]))

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(js, log2_bounds, "o-", ms=4, label=f"bounds above target k={k}")
    ref = [log2_bounds[0] - (j - js[0]) for j in js]
    ax.plot(js, ref, "--", lw=1, color="tab:red", label="$2^{-j}$ reference")
    ax.set_xlabel("annulus index $j$")
    ax.set_ylabel("$\\log_2$ enclosure bound")
    ax.legend(loc="upper right", fontsize=8)

    annotations = {"k": k, "median_log2_ratio": med, "count": len(pairs)}
    _annotate(ax, [f"median log2(b_j / b_j+1) = {med!r}"])
    fig.tight_layout()
    return fig, annotations


def sobolev_figure(report):
    """Partial squared norms per truncation with the reported leftover
    bound above the last included stage."""
    partials = report["partials"]
    stages = list(range(1, len(partials) + 1))

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(stages, partials, "o-", ms=4, label="partial squared norm")
    ax.axhline(report["norm_squared"], lw=1, color="tab:red",
               label="value at full truncation")
    ax.set_xlabel("truncation stage")
    ax.set_ylabel(f"squared norm, s = {report['s']!r}")
    ax.legend(loc="lower right", fontsize=8)

    annotations = {
        "s": report["s"],
        "j_max": report["j_max"],
        "norm_squared": report["norm_squared"],
        "tail_bound": report["tail_bound"],
    }
    _annotate(ax, [f"squared norm = {report['norm_squared']!r}",
                   f"tail bound past j_max = {report['tail_bound']!r}"])
    fig.tight_layout()
    return fig, annotations
