"""Public DTW interface with kernel selection.

The compiled kernel is used when the extension built; setting the
environment variable DUALQ_PURE_PYTHON (to any non-empty value) before
import forces the pure-Python fallback. Both kernels are
arithmetic-identical, so results never depend on which one ran.
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("DUALQ_PURE_PYTHON"):
    from . import _dtw_py as _kernel
else:
    try:
        from . import _dtwc as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _dtw_py as _kernel

IMPLEMENTATION: str = _kernel.IMPLEMENTATION


def _prepare(x, y, band: int | None):
    xa = np.ascontiguousarray(x, dtype=np.float64)
    ya = np.ascontiguousarray(y, dtype=np.float64)
    if xa.ndim != 1 or ya.ndim != 1:
        raise ValueError(f"series must be 1-D, got shapes {xa.shape}, {ya.shape}")
    if xa.size == 0 or ya.size == 0:
        raise ValueError("series must be non-empty")
    if not (np.isfinite(xa).all() and np.isfinite(ya).all()):
        raise ValueError("series must be finite")
    if band is None:
        b = -1
    else:
        b = int(band)
        if b < abs(xa.size - ya.size):
            raise ValueError(
                f"band {b} cannot align lengths {xa.size} and {ya.size}; "
                f"need at least {abs(xa.size - ya.size)}"
            )
    return xa, ya, b


def dtw_alignment(x, y, band: int | None = None) -> tuple[float, int, float]:
    """Full result: (raw_cost, path_len, normalized_cost).

    The normalized cost divides the raw cost by the number of cells on
    the backtracked optimal path, making series of different lengths
    comparable on one scale.
    """
    xa, ya, b = _prepare(x, y, band)
    raw, plen = _kernel.dtw_pair(xa, ya, b)
    return raw, plen, raw / plen


def dtw_raw(x, y, band: int | None = None) -> float:
    xa, ya, b = _prepare(x, y, band)
    raw, _ = _kernel.dtw_pair(xa, ya, b)
    return raw


def dtw_norm(x, y, band: int | None = None) -> float:
    xa, ya, b = _prepare(x, y, band)
    raw, plen = _kernel.dtw_pair(xa, ya, b)
    return raw / plen
