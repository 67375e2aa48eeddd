"""Core data containers and the block segmentation rule.

All public index contracts are 1-based: observation indices run 1..n,
segment boundaries 1..p_n, and change-point locations lie strictly inside
(1, n). Internal numpy arrays are 0-based as usual.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "Dataset",
    "Segmentation",
    "ChangePointTruth",
    "DetectionResult",
    "make_segmentation",
    "true_boundary_index",
]


class SegmentationError(ValueError):
    """Raised when a requested segmentation is infeasible for the data."""


@dataclass(frozen=True)
class Dataset:
    """An observed regression sequence: rows x_i in R^q with responses y_i.

    Entries must be finite; NaN or infinity is rejected at construction.
    """

    x: NDArray[np.float64]
    y: NDArray[np.float64]

    def __post_init__(self) -> None:
        x = np.ascontiguousarray(np.atleast_2d(np.asarray(self.x, dtype=np.float64)))
        y = np.ascontiguousarray(np.asarray(self.y, dtype=np.float64).ravel())
        if x.ndim != 2:
            raise ValueError("x must be a 2-D matrix")
        if x.shape[0] != y.shape[0]:
            raise ValueError(
                f"x has {x.shape[0]} rows but y has {y.shape[0]} entries"
            )
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError("need at least one observation and one predictor")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
            raise ValueError("non-finite values in dataset")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def q(self) -> int:
        return self.x.shape[1]

    def rows(self, start: int, end: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Slice observations start..end (1-based, inclusive)."""
        if not (1 <= start <= end <= self.n):
            raise IndexError(f"row range ({start}, {end}) outside 1..{self.n}")
        return self.x[start - 1 : end], self.y[start - 1 : end]


@dataclass(frozen=True)
class Segmentation:
    """Partition of 1..n into p_n+1 contiguous blocks.

    The first block absorbs the remainder (length n - p_n*m >= m) and every
    later block has length exactly m = floor(n / (p_n + 1)).
    """

    n: int
    p_n: int
    m: int
    blocks: tuple[tuple[int, int], ...]

    @property
    def n_blocks(self) -> int:
        return self.p_n + 1

    @property
    def first_block_length(self) -> int:
        start, end = self.blocks[0]
        return end - start + 1

    def block(self, j: int) -> tuple[int, int]:
        """Index range of block j (1-based block number)."""
        if not (1 <= j <= self.n_blocks):
            raise IndexError(f"block {j} outside 1..{self.n_blocks}")
        return self.blocks[j - 1]

    def boundary_location(self, r: int) -> int:
        """Last observation index of block r, i.e. the r-th segment boundary."""
        if not (1 <= r <= self.p_n):
            raise IndexError(f"boundary {r} outside 1..{self.p_n}")
        return self.blocks[r - 1][1]


@dataclass(frozen=True)
class ChangePointTruth:
    """Ground truth for a simulated sequence: locations and coefficient jumps."""

    locations: tuple[int, ...]
    deltas: tuple[tuple[float, ...], ...]
    n: int

    def __post_init__(self) -> None:
        locs = tuple(int(a) for a in self.locations)
        deltas = tuple(tuple(float(v) for v in d) for d in self.deltas)
        if len(locs) != len(deltas):
            raise ValueError("locations and deltas must have equal length")
        if any(not (1 < a < self.n) for a in locs):
            raise ValueError("change locations must lie strictly inside (1, n)")
        if any(b >= a for a, b in zip(locs[1:], locs[:-1])):
            raise ValueError("change locations must be strictly increasing")
        if any(all(v == 0.0 for v in d) for d in deltas):
            raise ValueError("each delta must be nonzero")
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "deltas", deltas)

    @property
    def k0(self) -> int:
        return len(self.locations)


@dataclass(frozen=True)
class DetectionResult:
    """Outcome of one detection run."""

    algorithm: str
    k_hat: int
    locations: tuple[int, ...]
    boundary_hits: tuple[int, ...]
    rss: float
    runtime: float
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.k_hat != len(self.locations):
            raise ValueError("k_hat must equal the number of locations")
        if any(b >= a for a, b in zip(self.locations[1:], self.locations[:-1])):
            raise ValueError("locations must be strictly increasing")
        if self.rss < 0:
            raise ValueError("rss must be nonnegative")


def make_segmentation(n: int, p_n: int, q: int | None = None) -> Segmentation:
    """Build the unique segmentation of 1..n into p_n+1 blocks.

    m = floor(n / (p_n + 1)); blocks 2..p_n+1 have length m and block 1 takes
    the leading remainder. When q is given, every block must support an OLS
    fit (m >= q + 1), otherwise the segmentation is rejected as infeasible.
    """
    if p_n < 1:
        raise SegmentationError(f"p_n must be >= 1, got {p_n}")
    m = n // (p_n + 1)
    if m < 1:
        raise SegmentationError(f"segmentation infeasible: n={n} too small for p_n={p_n}")
    if q is not None and m < q + 1:
        raise SegmentationError(
            f"segmentation infeasible: block length m={m} < q+1={q + 1}"
        )
    first_len = n - p_n * m
    blocks = [(1, first_len)]
    for j in range(2, p_n + 2):
        start = n - (p_n - j + 2) * m + 1
        blocks.append((start, n - (p_n - j + 1) * m))
    return Segmentation(n=n, p_n=p_n, m=m, blocks=tuple(blocks))


def true_boundary_index(seg: Segmentation, a: int) -> int:
    """Map a change location to the boundary index whose jump absorbs it.

    A change at the last index of block r, or interior to block r+1 short of
    its last index, shifts coefficients from the start of block r+1 onward,
    so it is attributed to boundary r. Locations before the first boundary
    map to boundary 1.
    """
    if not (1 < a < seg.n):
        raise IndexError(f"location {a} outside (1, {seg.n})")
    t = a - (seg.n - seg.p_n * seg.m)
    if t < 0:
        return 1
    return min(t // seg.m + 1, seg.p_n)
