"""Deterministic sample points inside a chart box."""

from __future__ import annotations

import numpy as np

__all__ = ["sample_points", "DEFAULT_SEED"]

DEFAULT_SEED = 42
_MARGIN = 0.05


def sample_points(lower, upper, n: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """``n`` points in the box: the centre first, then uniform draws.

    Random draws stay ``5%`` of each side away from the faces.  The same
    ``(box, n, seed)`` always gives the same array.
    """
    if n < 1:
        raise ValueError("need at least one sample point")
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    centre = 0.5 * (lo + hi)
    if n == 1:
        return centre[None, :]
    pad = _MARGIN * (hi - lo)
    rng = np.random.default_rng(seed)
    draws = rng.uniform(lo + pad, hi - pad, size=(n - 1, lo.shape[0]))
    return np.vstack([centre, draws])
