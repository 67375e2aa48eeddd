"""Kernel backend selection.

The environment variable SEGLINE_BACKEND picks the implementation of the
hot kernels:

  numba  - require the numba-compiled kernels (ImportError if unavailable)
  numpy  - force the pure-numpy fallback
  unset  - use numba when importable, else fall back silently

``BACKEND`` records which one is active.
"""

from __future__ import annotations

import os

from . import _impl

__all__ = ["BACKEND", "cd_weighted_l1", "cusum_scan", "split_rss_scan"]

_requested = os.environ.get("SEGLINE_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise ValueError(
        f"SEGLINE_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    BACKEND = "numpy"
else:
    try:
        from . import _numba

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        BACKEND = "numpy"

if BACKEND == "numba":
    cd_weighted_l1 = _numba.cd_weighted_l1
    cusum_scan = _numba.cusum_scan
    split_rss_scan = _numba.split_rss_scan
else:
    cd_weighted_l1 = _impl.cd_weighted_l1
    cusum_scan = _impl.cusum_scan
    split_rss_scan = _impl.split_rss_scan
