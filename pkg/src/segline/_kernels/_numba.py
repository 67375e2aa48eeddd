"""Numba-compiled versions of the hot kernels."""

from __future__ import annotations

from numba import njit

from . import _impl

cd_weighted_l1 = njit(cache=True)(_impl.cd_weighted_l1)
cusum_scan = njit(cache=True)(_impl.cusum_scan)
split_rss_scan = njit(cache=True)(_impl.split_rss_scan)
