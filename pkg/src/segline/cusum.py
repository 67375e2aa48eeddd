"""Regression CUSUM test and split-RSS refinement on index windows.

The test statistic is the max over splits k of a quadratic form in the
partial residual sums, computed in O(N q^2) by rank-one recursions. It
equals N * (full-window residual variance minus best split residual
variance), which the asymptotic Gumbel threshold calibrates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import _kernels
from .model import Dataset

__all__ = [
    "CusumWindow",
    "CusumOutcome",
    "MIN_THRESHOLD_WINDOW",
    "cusum_statistic",
    "cusum_threshold",
    "cusum_test",
    "refine_changepoint",
]

# log log log N needs N > e^e; the first integer with a usable triple log
MIN_THRESHOLD_WINDOW = 16

REFACTOR_EVERY = 64


@dataclass(frozen=True)
class CusumWindow:
    """Inclusive 1-based index range on which a single-change test runs."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.hi < self.lo:
            raise ValueError(f"empty window ({self.lo}, {self.hi})")

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class CusumOutcome:
    statistic: float
    k_hat: int
    threshold: float
    reject: bool
    sigma2_window: float
    skipped_splits: int = 0


def _window_arrays(data: Dataset, w: CusumWindow):
    if not (1 <= w.lo and w.hi <= data.n):
        raise ValueError(f"window ({w.lo}, {w.hi}) outside 1..{data.n}")
    return data.rows(w.lo, w.hi)


def cusum_statistic(data: Dataset, w: CusumWindow) -> tuple[float, int, int]:
    """Max-over-splits statistic on the window.

    Returns (T, k_hat, skipped) with k_hat the smallest maximizing split
    index (1-based, absolute) and skipped the number of split positions
    dropped for numerically singular partial Grams.
    """
    q = data.q
    if w.length < 2 * q + 2:
        raise ValueError(
            f"window of length {w.length} too short for q={q} (need >= {2 * q + 2})"
        )
    xw, yw = _window_arrays(data, w)
    t_stat, t_off, skipped = _kernels.cusum_scan(xw, yw, REFACTOR_EVERY)
    if t_off < 0:
        raise ArithmeticError("every split position was numerically singular")
    return float(t_stat), w.lo + int(t_off), int(skipped)


def cusum_threshold(n_window: int, q: int, alpha: float) -> float:
    """Critical multiplier for the statistic at level alpha.

    The caller multiplies by the full-window residual variance. Derived from
    the Gumbel limit of the normalized statistic:
    a = sqrt(2 log log N), b = 2 log log N + (q/2) log log log N - log Gamma(q/2),
    threshold = (b/a)^2 + 2 (b/a^2) log(-2 / log(1 - alpha)).
    """
    if n_window <= MIN_THRESHOLD_WINDOW:
        raise ValueError(
            f"window length {n_window} too short for the asymptotic threshold "
            f"(need > {MIN_THRESHOLD_WINDOW})"
        )
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if q < 1:
        raise ValueError("q must be >= 1")
    lln = math.log(math.log(n_window))
    a = math.sqrt(2.0 * lln)
    b = 2.0 * lln + 0.5 * q * math.log(lln) - float(gammaln(q / 2.0))
    b_tilde = (b / a) ** 2
    a_tilde = b / (a * a)
    x_alpha = 2.0 * math.log(-2.0 / math.log1p(-alpha))
    return b_tilde + a_tilde * x_alpha


def cusum_test(data: Dataset, w: CusumWindow, alpha: float) -> CusumOutcome:
    """Level-alpha single-change test on the window."""
    t_stat, k_hat, skipped = cusum_statistic(data, w)
    xw, yw = _window_arrays(data, w)
    beta = np.linalg.pinv(xw.T @ xw) @ (xw.T @ yw)
    resid = yw - xw @ beta
    sigma2 = float(resid @ resid) / w.length
    threshold = cusum_threshold(w.length, data.q, alpha) * sigma2
    if sigma2 <= 0:
        # degenerate exact fit: any positive statistic is overwhelming evidence
        reject = t_stat > 0
    else:
        reject = t_stat > threshold
    return CusumOutcome(
        statistic=t_stat,
        k_hat=k_hat,
        threshold=threshold,
        reject=bool(reject),
        sigma2_window=sigma2,
        skipped_splits=skipped,
    )


def refine_changepoint(data: Dataset, window: tuple[int, int]) -> int:
    """Exhaustive split-RSS search: the index minimizing summed two-side RSS.

    Splits leave at least q+1 points per side; the smallest minimizer wins
    ties. Returns the last index of the left regime (1-based, absolute).
    """
    lo, hi = window
    lo = max(lo, 1)
    hi = min(hi, data.n)
    length = hi - lo + 1
    if length < 2 * (data.q + 1):
        raise ValueError(
            f"window of length {length} too short to split with q={data.q}"
        )
    xw, yw = data.rows(lo, hi)
    t_best, _ = _kernels.split_rss_scan(xw, yw)
    return lo + int(t_best)
