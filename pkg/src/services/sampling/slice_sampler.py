"""
Univariate shrinkage slice sampling on a bounded interval
"""

from typing import Callable
import logging

import numpy as np

logger = logging.getLogger(__name__)

MAX_SHRINK_STEPS = 200


def slice_sample_bounded(
    logpdf: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    lower: float,
    upper: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """One slice update for a batch of independent univariate targets.

    `logpdf` maps a vector of positions to a vector of log densities (one per
    target). The initial bracket is the whole support, so no step-out is needed.
    """
    x0 = np.asarray(x0, dtype=float)
    log_y = logpdf(x0) - rng.exponential(size=x0.shape)
    if not np.all(np.isfinite(log_y)):
        raise ValueError("slice sampler started from a point of zero density")

    left = np.full(x0.shape, lower, dtype=float)
    right = np.full(x0.shape, upper, dtype=float)
    result = x0.copy()
    pending = np.ones(x0.shape, dtype=bool)

    for _ in range(MAX_SHRINK_STEPS):
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            break
        proposal = rng.uniform(left[idx], right[idx])
        full = result.copy()
        full[idx] = proposal
        log_p = logpdf(full)[idx]
        accepted = log_p >= log_y[idx]
        result[idx[accepted]] = proposal[accepted]
        pending[idx[accepted]] = False

        rejected = idx[~accepted]
        below = proposal[~accepted] < x0[rejected]
        left[rejected[below]] = proposal[~accepted][below]
        right[rejected[~below]] = proposal[~accepted][~below]
    else:
        if pending.any():
            logger.warning(f"Slice sampler hit the shrink limit for {int(pending.sum())} targets; keeping current values")
            result[pending] = x0[pending]

    return result
