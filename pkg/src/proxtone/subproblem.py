"""Lasso subproblem solver: proximal gradient descent with backtracking.

Minimizes G(x) + lambda2 * ||x_masked||_1 for a strongly convex quadratic
surrogate G. The step size resets to lambda_init at each outer iteration and
shrinks by beta until the sufficient-decrease test passes. Unmasked
coordinates take the plain gradient step (no shrinkage).
"""

from dataclasses import dataclass, replace as dc_replace

import numpy as np

from .prox import soft_threshold


class SubproblemError(RuntimeError):
    pass


@dataclass
class SubproblemConfig:
    max_iter: int = 100
    abstol: float = 1e-5
    lambda_init: float = 1.0
    beta: float = 0.5
    penalty_mask: np.ndarray = None

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.abstol <= 0:
            raise ValueError("abstol must be positive")
        if not 0 < self.beta < 1:
            raise ValueError("beta must be in (0, 1)")
        if self.lambda_init <= 0:
            raise ValueError("lambda_init must be positive")


def _masked_prox(v, eps, mask):
    if mask is None:
        return soft_threshold(v, eps)
    out = np.array(v, dtype=float)
    out[mask] = soft_threshold(v[mask], eps)
    return out


def _masked_l1(x, mask):
    return float(np.abs(x if mask is None else x[mask]).sum())


def solve_lasso(surrogate, reg, x_start, config, info=None):
    """Prox-gradient iterations on the surrogate until the successive objective
    change falls below abstol or max_iter is reached. Returns the last iterate;
    info (optional dict) receives iterations and a converged flag."""
    lam2 = reg.lambda2
    mask = config.penalty_mask
    x = np.asarray(x_start, dtype=float).copy()
    f_prev = None
    converged = False
    iters = 0
    for i in range(1, config.max_iter + 1):
        g_val, g_grad = surrogate.value_grad(x)
        if not np.all(np.isfinite(g_grad)):
            raise SubproblemError("surrogate diverged")
        lam = config.lambda_init
        while True:
            z = _masked_prox(x - lam * g_grad, lam * lam2, mask)
            dz = z - x
            if surrogate.value(z) <= g_val + float(g_grad @ dz) + float(dz @ dz) / (2.0 * lam):
                break
            lam *= config.beta
            if lam < 1e-16:
                raise SubproblemError("backtracking step underflow")
        x = z
        iters = i
        f_cur = surrogate.value(x) + lam2 * _masked_l1(x, mask)
        if i > 1 and abs(f_cur - f_prev) < config.abstol:
            converged = True
            break
        f_prev = f_cur
    if info is not None:
        info["iterations"] = iters
        info["converged"] = converged or config.max_iter == 1
    return x


def solve_lasso_inexact(surrogate, reg, x_start, config, info=None):
    """Single backtracked prox-gradient step (the fast inexact subsolve)."""
    return solve_lasso(surrogate, reg, x_start, dc_replace(config, max_iter=1), info=info)
