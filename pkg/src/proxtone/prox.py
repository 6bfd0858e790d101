"""Elementwise proximal operators and the L1/L2 regularizer algebra."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RegularizerConfig:
    """L2 coefficient lambda1 (folded into the smooth part) and L1 coefficient lambda2."""

    lambda1: float = 1e-4
    lambda2: float = 1e-4

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("regularization coefficients must be nonnegative")


def _check_finite(x):
    bad = ~np.isfinite(x)
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        raise ValueError(f"non-finite component at index {idx}")


def soft_threshold(x, eps):
    """Shrink x toward zero by eps; components with |x_j| <= eps become exact zeros."""
    x = np.asarray(x, dtype=float)
    if eps < 0:
        raise ValueError("threshold must be nonnegative")
    _check_finite(x)
    return np.sign(x) * np.maximum(np.abs(x) - eps, 0.0)


def l1_norm(x):
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    return float(np.abs(x).sum())


def nnz(x, tau=0.0):
    """Number of components with |x_j| > tau; tau=0 counts exact nonzeros."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    x = np.asarray(x, dtype=float)
    return int(np.count_nonzero(np.abs(x) > tau))
