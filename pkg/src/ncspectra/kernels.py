"""Kernel dispatch: the compiled extension when built, numpy otherwise.

Set ``NCSPECTRA_PURE=1`` to force the numpy fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("NCSPECTRA_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def tensor_counts(v1, w1, v2_sorted, cw2, grid) -> np.ndarray:
    return _impl.tensor_counts(
        np.ascontiguousarray(v1, dtype=np.float64),
        np.ascontiguousarray(w1, dtype=np.float64),
        np.ascontiguousarray(v2_sorted, dtype=np.float64),
        np.ascontiguousarray(cw2, dtype=np.float64),
        np.ascontiguousarray(grid, dtype=np.float64),
    )


def edge_quotient_max(fsrc, fdst, lengths) -> float:
    return float(
        _impl.edge_quotient_max(
            np.ascontiguousarray(fsrc, dtype=np.complex128),
            np.ascontiguousarray(fdst, dtype=np.complex128),
            np.ascontiguousarray(lengths, dtype=np.float64),
        )
    )
