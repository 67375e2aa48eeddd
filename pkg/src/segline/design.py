"""The lower-block-triangular cumulative design for the segmented model.

Group 0 carries the base coefficients and spans all rows; group r >= 1
carries the jump at boundary r and its columns are the predictor columns
with rows before block r+1 zeroed. The design is never materialized for
solving: suffix sums of x_i x_i' and x_i y_i give every Gram and
cross-product entry in O(1), so the (p_n+1)q square Gram is cheap to
assemble even for large n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .model import Dataset, Segmentation

__all__ = ["SegmentedDesign"]


@dataclass(frozen=True)
class SegmentedDesign:
    data: Dataset
    seg: Segmentation
    starts: NDArray[np.int64]  # 0-based first row of each group
    gram: NDArray[np.float64]  # (P, P) with P = (p_n + 1) q
    xty: NDArray[np.float64]  # (P,)
    yty: float

    @classmethod
    def build(cls, data: Dataset, seg: Segmentation) -> "SegmentedDesign":
        x, y = data.x, data.y
        n, q = x.shape
        n_groups = seg.p_n + 1
        # group r >= 1 starts at the first row of block r+1
        starts = np.zeros(n_groups, dtype=np.int64)
        for r in range(1, n_groups):
            starts[r] = seg.blocks[r][0] - 1

        # suffix sums: suf_xx[i] = sum_{l >= i} x_l x_l', suf_xy[i] likewise
        xx = np.einsum("ij,ik->ijk", x, x)
        suf_xx = np.zeros((n + 1, q, q))
        suf_xx[:n] = np.cumsum(xx[::-1], axis=0)[::-1]
        suf_xy = np.zeros((n + 1, q))
        suf_xy[:n] = np.cumsum((x * y[:, None])[::-1], axis=0)[::-1]

        p_total = n_groups * q
        gram = np.empty((p_total, p_total))
        for g in range(n_groups):
            for h in range(g, n_groups):
                blockm = suf_xx[starts[h]]  # starts are nondecreasing
                gram[g * q : (g + 1) * q, h * q : (h + 1) * q] = blockm
                if h != g:
                    gram[h * q : (h + 1) * q, g * q : (g + 1) * q] = blockm.T
        xty = np.concatenate([suf_xy[s] for s in starts])
        return cls(
            data=data,
            seg=seg,
            starts=starts,
            gram=gram,
            xty=xty,
            yty=float(y @ y),
        )

    @property
    def n_groups(self) -> int:
        return self.seg.p_n + 1

    @property
    def q(self) -> int:
        return self.data.q

    @property
    def p_total(self) -> int:
        return self.n_groups * self.q

    def group_coef(self, theta: NDArray[np.float64], g: int) -> NDArray[np.float64]:
        return theta[g * self.q : (g + 1) * self.q]

    def rss(self, theta: NDArray[np.float64]) -> float:
        val = self.yty - 2.0 * (self.xty @ theta) + theta @ (self.gram @ theta)
        return max(float(val), 0.0)

    def fitted(self, theta: NDArray[np.float64]) -> NDArray[np.float64]:
        """Fitted values via the telescoping structure, O(nq)."""
        cum = np.cumsum(theta.reshape(self.n_groups, self.q), axis=0)
        x = self.data.x
        out = np.empty(self.data.n)
        bounds = np.append(self.starts, self.data.n)
        for g in range(self.n_groups):
            lo, hi = int(bounds[g]), int(bounds[g + 1])
            out[lo:hi] = x[lo:hi] @ cum[g]
        return out

    def to_dense(self) -> NDArray[np.float64]:
        """Materialize the full n x (p_n+1)q design (tests / small n only)."""
        x = self.data.x
        n = self.data.n
        out = np.zeros((n, self.p_total))
        for g in range(self.n_groups):
            s = int(self.starts[g])
            out[s:, g * self.q : (g + 1) * self.q] = x[s:]
        return out
