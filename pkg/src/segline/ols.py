"""Per-block least squares, coefficient-jump estimates, and chi-square tests.

The jump estimate at boundary r is the difference of the OLS coefficient
vectors of blocks r+1 and r. The noise variance comes from the first-block
fit alone, so it is unaffected by changes located at later boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from .model import Dataset, Segmentation

__all__ = [
    "SegmentFit",
    "DeltaEstimates",
    "NoiseModel",
    "segment_ols",
    "estimate_deltas",
    "noise_variance",
    "chi2_quantile",
    "delta_test_single",
    "delta_test_pair",
]


@dataclass(frozen=True)
class SegmentFit:
    """OLS fit of one block."""

    beta_hat: NDArray[np.float64]
    gram: NDArray[np.float64]
    rss: float
    dof: int
    rank_deficient: bool = False


@dataclass(frozen=True)
class DeltaEstimates:
    """Boundary jump estimates with the block Gram matrices behind them."""

    d_hat: NDArray[np.float64]  # (p_n, q)
    grams: tuple[NDArray[np.float64], ...]  # p_n + 1 block Grams
    sigma2_hat: float
    fits: tuple[SegmentFit, ...]

    @property
    def p_n(self) -> int:
        return self.d_hat.shape[0]

    @property
    def any_rank_deficient(self) -> bool:
        return any(f.rank_deficient for f in self.fits)


@dataclass(frozen=True)
class NoiseModel:
    """Error variance and limiting predictor Gram, for Monte Carlo checks."""

    sigma2: float
    w: NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        w = np.asarray(self.w, dtype=np.float64)
        if not np.allclose(w, w.T):
            raise ValueError("W must be symmetric")
        if np.linalg.eigvalsh(w)[0] <= 0:
            raise ValueError("W must be positive definite")


def segment_ols(data: Dataset, block: tuple[int, int]) -> SegmentFit:
    """Least-squares fit of one block (1-based inclusive index range).

    Uses an orthogonal factorization rather than normal equations; a
    rank-deficient block yields the minimum-norm solution and sets the
    rank_deficient flag.
    """
    start, end = block
    if end < start:
        raise ValueError(f"empty block ({start}, {end})")
    x, y = data.rows(start, end)
    beta, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ beta
    rss = float(resid @ resid)
    return SegmentFit(
        beta_hat=beta,
        gram=x.T @ x,
        rss=rss,
        dof=(end - start + 1) - data.q,
        rank_deficient=rank < data.q,
    )


def noise_variance(data: Dataset, seg: Segmentation) -> float:
    """First-block residual variance with divisor (first length - q)."""
    first = seg.blocks[0]
    length = first[1] - first[0] + 1
    if length <= data.q:
        raise ValueError(
            f"first block length {length} must exceed q={data.q} for a variance estimate"
        )
    fit = segment_ols(data, first)
    return fit.rss / (length - data.q)


def estimate_deltas(data: Dataset, seg: Segmentation) -> DeltaEstimates:
    """Jump estimates d_hat[r] = OLS(block r+1) - OLS(block r), r = 1..p_n."""
    fits = tuple(segment_ols(data, b) for b in seg.blocks)
    betas = np.stack([f.beta_hat for f in fits])
    return DeltaEstimates(
        d_hat=betas[1:] - betas[:-1],
        grams=tuple(f.gram for f in fits),
        sigma2_hat=noise_variance(data, seg),
        fits=fits,
    )


def chi2_quantile(alpha: float, df: int) -> float:
    """Upper-tail chi-square quantile: x with P(chi2_df > x) = alpha."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    return float(stats.chi2.isf(alpha, df))


def _quadratic_test(
    d: NDArray[np.float64],
    gram: NDArray[np.float64],
    sigma2: float,
    alpha: float,
    df: int,
    denom_factor: float,
) -> tuple[float, bool]:
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    d = np.asarray(d, dtype=np.float64).ravel()
    statistic = float(d @ (np.asarray(gram) @ d)) / (denom_factor * sigma2)
    return statistic, statistic >= chi2_quantile(alpha, df)


def delta_test_single(
    d: NDArray[np.float64],
    gram: NDArray[np.float64],
    sigma2: float,
    alpha: float,
    *,
    wald_normalization: bool = False,
) -> tuple[float, bool]:
    """Test one boundary jump against zero.

    The statistic is d' G d / (2 q sigma2) compared with the chi-square
    alpha-quantile at q degrees of freedom. The extra division by q makes
    the reference conservative; wald_normalization=True drops it.
    """
    q = np.asarray(d).size
    denom = 2.0 if wald_normalization else 2.0 * q
    return _quadratic_test(d, gram, sigma2, alpha, q, denom)


def delta_test_pair(
    d_sum: NDArray[np.float64],
    gram: NDArray[np.float64],
    sigma2: float,
    alpha: float,
    *,
    wald_normalization: bool = False,
) -> tuple[float, bool]:
    """Test the sum of two adjacent boundary jumps against zero (df = 2q)."""
    q = np.asarray(d_sum).size
    denom = 2.0 if wald_normalization else 2.0 * q
    return _quadratic_test(d_sum, gram, sigma2, alpha, 2 * q, denom)
