"""Rank-correlation and significance statistics used by the evaluation reports.

All tests are two-sided. Tied observations receive average ranks.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "average_ranks",
    "spearman",
    "abs_rho",
    "wilcoxon_signed_rank",
    "z_test",
    "WilcoxonResult",
    "ZTestResult",
]

# Exact Wilcoxon null distribution up to this many nonzero differences;
# normal approximation with tie correction beyond it.
EXACT_WILCOXON_MAX_N = 20


class WilcoxonResult(NamedTuple):
    statistic: float  # W = min(W+, W-)
    p_value: float
    n: int  # pairs remaining after dropping zero differences
    method: str  # "exact", "normal", or "degenerate"


class ZTestResult(NamedTuple):
    statistic: float
    p_value: float


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """Rank ``values`` ascending (1-based), assigning tied values their average rank."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1-d sequence")
    n = len(x)
    order = np.argsort(x, kind="stable")
    sx = x[order]
    ranks = np.empty(n, dtype=float)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(pred: Sequence[float], gold: Sequence[float]) -> float:
    """Spearman rank correlation with average ranks for ties.

    Computed as the Pearson correlation of the two rank vectors. Raises
    ``ValueError`` on length mismatch, fewer than two observations, or a
    constant argument (the correlation is undefined there).
    """
    p = np.asarray(pred, dtype=float)
    g = np.asarray(gold, dtype=float)
    if p.shape != g.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {g.shape}")
    if p.ndim != 1 or len(p) < 2:
        raise ValueError("need at least two paired observations")
    if np.all(g == g[0]):
        raise ValueError("gold scores are constant; correlation undefined")
    if np.all(p == p[0]):
        raise ValueError("predicted scores are constant; correlation undefined")
    rp = average_ranks(p)
    rg = average_ranks(g)
    rp -= rp.mean()
    rg -= rg.mean()
    denom = math.sqrt(float(rp @ rp) * float(rg @ rg))
    rho = float(rp @ rg) / denom
    return min(1.0, max(-1.0, rho))


def abs_rho(pred: Sequence[float], gold: Sequence[float]) -> float:
    """|Spearman rho|; polarity-agnostic so inverted gold scales compare cleanly."""
    return abs(spearman(pred, gold))


def _exact_wilcoxon_p(doubled_ranks: np.ndarray, w_plus_doubled: int) -> float:
    # Null distribution of 2*W+ by subset-sum counting over the doubled
    # (hence integer) signed ranks; counts fit in int64 for n <= 20.
    total = int(doubled_ranks.sum())
    ways = np.zeros(total + 1, dtype=np.int64)
    ways[0] = 1
    for r in doubled_ranks:
        r = int(r)
        ways[r:] = ways[r:] + ways[: total + 1 - r]
    n_outcomes = float(2 ** len(doubled_ranks))
    cdf_lo = float(ways[: w_plus_doubled + 1].sum()) / n_outcomes
    cdf_hi = float(ways[w_plus_doubled:].sum()) / n_outcomes
    return min(1.0, 2.0 * min(cdf_lo, cdf_hi))


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float]) -> WilcoxonResult:
    """Paired Wilcoxon signed-rank test of ``a`` versus ``b``.

    Zero differences are dropped. The statistic is W = min(W+, W-) over the
    average-ranked absolute differences. The p-value is exact (full sign-flip
    enumeration) for up to ``EXACT_WILCOXON_MAX_N`` nonzero differences and a
    tie-corrected normal approximation beyond that. If every difference is
    zero the result is flagged degenerate with p = 1.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("expected two 1-d sequences of equal length")
    d = x - y
    d = d[d != 0.0]
    n = len(d)
    if n == 0:
        return WilcoxonResult(0.0, 1.0, 0, "degenerate")
    ranks = average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)
    if n <= EXACT_WILCOXON_MAX_N:
        # Average ranks are exact halves, so doubling gives exact integers.
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        p = _exact_wilcoxon_p(doubled, int(round(2.0 * w_plus)))
        return WilcoxonResult(w, p, n, "exact")
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, counts = np.unique(ranks, return_counts=True)
    var -= float((counts.astype(float) ** 3 - counts).sum()) / 48.0
    z = (w_plus - mean) / math.sqrt(var)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return WilcoxonResult(w, min(1.0, p), n, "normal")


def z_test(a: Sequence[float], b: Sequence[float]) -> ZTestResult:
    """Two-sample z-test on the means of ``a`` and ``b`` (sample variances)."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or len(x) < 2 or len(y) < 2:
        raise ValueError("each sample needs at least two observations")
    se2 = x.var(ddof=1) / len(x) + y.var(ddof=1) / len(y)
    if se2 <= 0.0:
        raise ValueError("zero variance in both samples; z undefined")
    z = float((x.mean() - y.mean()) / math.sqrt(se2))
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return ZTestResult(z, min(1.0, p))
