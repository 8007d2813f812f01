"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

from __future__ import annotations

import numpy as np


def tensor_counts(v1, w1, v2_sorted, cw2, grid) -> np.ndarray:
    """Counting function of the product spectrum, one value per grid point.

    ``cw2[i]`` is the sum of the weights of ``v2_sorted[:i]`` (length n2 + 1).
    """
    v1 = np.asarray(v1, dtype=np.float64)
    w1 = np.asarray(w1, dtype=np.float64)
    out = np.empty(len(grid), dtype=np.float64)
    for g, t in enumerate(np.asarray(grid, dtype=np.float64)):
        live = v1 < t
        x = np.sqrt(t * t - v1[live] * v1[live])
        idx = np.searchsorted(v2_sorted, x, side="left")
        out[g] = float(np.dot(w1[live], cw2[idx]))
    return out


def edge_quotient_max(fsrc, fdst, lengths) -> float:
    """max |fdst - fsrc| / length over edges, 0.0 for an empty edge set."""
    if len(lengths) == 0:
        return 0.0
    return float(np.max(np.abs(np.asarray(fdst) - np.asarray(fsrc)) / np.asarray(lengths)))
