"""Tests for the data containers and the block segmentation rule."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from segline.model import (
    ChangePointTruth,
    Dataset,
    DetectionResult,
    SegmentationError,
    make_segmentation,
    true_boundary_index,
)


class TestDataset:
    def test_basic_shape(self):
        data = Dataset(x=np.ones((5, 2)), y=np.arange(5.0))
        assert data.n == 5
        assert data.q == 2

    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="non-finite"):
            Dataset(x=np.array([[1.0], [np.nan]]), y=np.zeros(2))

    def test_rejects_inf_response(self):
        with pytest.raises(ValueError, match="non-finite"):
            Dataset(x=np.ones((2, 1)), y=np.array([0.0, np.inf]))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError, match="rows"):
            Dataset(x=np.ones((3, 1)), y=np.zeros(2))

    def test_rows_one_based_inclusive(self):
        data = Dataset(x=np.arange(8.0).reshape(4, 2), y=np.arange(4.0))
        x, y = data.rows(2, 3)
        assert np.array_equal(y, [1.0, 2.0])
        assert np.array_equal(x, [[2.0, 3.0], [4.0, 5.0]])

    def test_rows_out_of_range(self):
        data = Dataset(x=np.ones((3, 1)), y=np.zeros(3))
        with pytest.raises(IndexError):
            data.rows(0, 2)
        with pytest.raises(IndexError):
            data.rows(1, 4)

    def test_arrays_immutable(self):
        data = Dataset(x=np.ones((3, 1)), y=np.zeros(3))
        with pytest.raises(ValueError):
            data.y[0] = 1.0


class TestMakeSegmentation:
    def test_small_example(self):
        seg = make_segmentation(10, 2)
        assert seg.m == 3
        assert seg.blocks == ((1, 4), (5, 7), (8, 10))

    def test_large_example(self):
        seg = make_segmentation(5000, 100)
        assert seg.m == 49
        assert seg.first_block_length == 100

    def test_infeasible(self):
        with pytest.raises(SegmentationError, match="segmentation infeasible"):
            make_segmentation(12, 11, q=3)

    def test_rejects_bad_pn(self):
        with pytest.raises(SegmentationError):
            make_segmentation(10, 0)

    @given(
        n=st.integers(min_value=4, max_value=200),
        p_n=st.integers(min_value=1, max_value=20),
    )
    def test_partition_property(self, n, p_n):
        m = n // (p_n + 1)
        if m < 1:
            return
        seg = make_segmentation(n, p_n)
        lengths = [e - s + 1 for s, e in seg.blocks]
        assert sum(lengths) == n
        assert all(length == seg.m for length in lengths[1:])
        assert lengths[0] >= seg.m
        # contiguity: each block starts right after the previous one
        for (_, e_prev), (s_next, _) in zip(seg.blocks[:-1], seg.blocks[1:]):
            assert s_next == e_prev + 1
        assert seg.blocks[0][0] == 1
        assert seg.blocks[-1][1] == n

    def test_block_formula(self):
        # block j >= 2 covers n-(p_n-j+2)m+1 .. n-(p_n-j+1)m
        seg = make_segmentation(127, 7)
        for j in range(2, seg.n_blocks + 1):
            lo = seg.n - (seg.p_n - j + 2) * seg.m + 1
            hi = seg.n - (seg.p_n - j + 1) * seg.m
            assert seg.block(j) == (lo, hi)

    def test_boundary_location(self):
        seg = make_segmentation(10, 2)
        assert seg.boundary_location(1) == 4
        assert seg.boundary_location(2) == 7
        with pytest.raises(IndexError):
            seg.boundary_location(3)


class TestTrueBoundaryIndex:
    def test_first_index_of_block_two(self):
        seg = make_segmentation(10, 2)
        assert true_boundary_index(seg, 5) == 1

    def test_out_of_range(self):
        seg = make_segmentation(10, 2)
        with pytest.raises(IndexError):
            true_boundary_index(seg, 11)
        with pytest.raises(IndexError):
            true_boundary_index(seg, 1)

    def test_against_block_scan(self):
        # brute force: r is the boundary whose following block holds a
        seg = make_segmentation(5000, 100)
        for a in (500, 1000, 2077, 4546, 150, 4999):
            r = true_boundary_index(seg, a)
            blocks_holding = [
                j for j, (s, e) in enumerate(seg.blocks, start=1) if s <= a <= e
            ]
            j = blocks_holding[0]
            expected = min(max(j - 1, 1), seg.p_n)
            # attribution may sit on either side of the containing block
            assert r in (expected, min(j, seg.p_n))

    @given(
        n=st.integers(min_value=20, max_value=300),
        p_n=st.integers(min_value=1, max_value=12),
        frac=st.floats(min_value=0.01, max_value=0.99),
    )
    def test_round_trip(self, n, p_n, frac):
        if n // (p_n + 1) < 2:
            return
        seg = make_segmentation(n, p_n)
        a = min(max(int(n * frac), 2), n - 1)
        r = true_boundary_index(seg, a)
        assert 1 <= r <= seg.p_n
        # a lies within one block of boundary r
        assert seg.blocks[r - 1][0] - seg.m <= a <= seg.blocks[r][1] + seg.m


class TestChangePointTruth:
    def test_valid(self):
        t = ChangePointTruth(locations=(10, 20), deltas=((1.0,), (-1.0,)), n=30)
        assert t.k0 == 2

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError, match="increasing"):
            ChangePointTruth(locations=(20, 10), deltas=((1.0,), (1.0,)), n=30)

    def test_rejects_zero_delta(self):
        with pytest.raises(ValueError, match="nonzero"):
            ChangePointTruth(locations=(10,), deltas=((0.0, 0.0),), n=30)

    def test_rejects_boundary_location(self):
        with pytest.raises(ValueError, match="strictly inside"):
            ChangePointTruth(locations=(1,), deltas=((1.0,),), n=30)


class TestDetectionResult:
    def test_count_matches_locations(self):
        with pytest.raises(ValueError, match="k_hat"):
            DetectionResult(
                algorithm="x",
                k_hat=2,
                locations=(5,),
                boundary_hits=(),
                rss=0.0,
                runtime=0.0,
            )

    def test_rejects_negative_rss(self):
        with pytest.raises(ValueError, match="rss"):
            DetectionResult(
                algorithm="x",
                k_hat=0,
                locations=(),
                boundary_hits=(),
                rss=-1.0,
                runtime=0.0,
            )

    def test_rejects_unsorted_locations(self):
        with pytest.raises(ValueError, match="increasing"):
            DetectionResult(
                algorithm="x",
                k_hat=2,
                locations=(9, 3),
                boundary_hits=(),
                rss=0.0,
                runtime=0.0,
            )
