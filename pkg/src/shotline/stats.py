"""Two-sided Mann-Whitney rank-sum test.

Normal approximation with tie correction: ranks are assigned with ties
sharing the mean rank, U is computed from the rank sum of the first
sample, and the two-sided p-value comes from the tie-corrected normal
approximation of U's null distribution.  Fully tied data (zero
rank variance) returns p = 1.0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RankSumResult:
    u: float  # U statistic of the first sample
    p_value: float  # two-sided


def _rank_with_ties(values: np.ndarray) -> np.ndarray:
    """Fractional ranks (1-based); tied values share the mean rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def rank_sum_test(x, y) -> RankSumResult:
    """Mann-Whitney U of samples ``x`` and ``y`` with two-sided p-value."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n1, n2 = len(x), len(y)
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([x, y])
    ranks = _rank_with_ties(pooled)
    r1 = float(np.sum(ranks[:n1]))
    u1 = r1 - n1 * (n1 + 1) / 2.0  # pairs with x > y (ties counted half)

    n = n1 + n2
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(counts ** 3 - counts))
    correction = 1.0 - tie_term / (n ** 3 - n) if n > 1 else 0.0
    if correction <= 0.0:
        return RankSumResult(u=u1, p_value=1.0)

    mean_u = n1 * n2 / 2.0
    sd_u = math.sqrt(correction * n1 * n2 * (n + 1) / 12.0)
    if sd_u == 0.0:
        return RankSumResult(u=u1, p_value=1.0)
    z = (u1 - mean_u) / sd_u
    p = 2.0 * 0.5 * math.erfc(abs(z) / math.sqrt(2.0))
    return RankSumResult(u=u1, p_value=min(1.0, p))
