"""The four training loops behind one stepping interface.

All optimizers draw exactly one mini-batch index per step from their seeded
generator, so runs with matching seeds see identical sample sequences.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .hessian import (
    CurvatureHistory,
    bfgs_rebuild,
    bfgs_rebuild_subspace,
    constant_diagonal,
)
from .objectives import full_objective
from .prox import nnz, soft_threshold
from .subproblem import SubproblemConfig, SubproblemError, solve_lasso, solve_lasso_inexact
from .surrogate import QuadraticSurrogate, SharedSubspace, SubspaceSurrogate


class DivergedError(RuntimeError):
    """Raised when an iterate stops being finite; carries the last finite state."""

    def __init__(self, message, last_x=None):
        super().__init__(message)
        self.last_x = last_x


def _masked_soft_threshold(v, eps, mask):
    out = np.array(v, dtype=float)
    out[mask] = soft_threshold(v[mask], eps)
    return out


def _check_finite(x, last_x):
    if not np.all(np.isfinite(x)):
        raise DivergedError("iterate diverged", last_x=last_x)


class ProxSGD:
    """x <- S_{eta*lambda2}[x - eta * grad g_{i_k}(x)]."""

    def __init__(self, components, reg, x0, eta, seed=0, rng=None):
        if eta <= 0:
            raise ValueError("eta must be positive")
        self.components = components
        self.reg = reg
        self.n = len(components)
        self.x = np.array(x0, dtype=float)
        self.eta = float(eta)
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.mask = components[0].penalty_mask
        self.grad_evals = 0

    def step(self):
        i = int(self.rng.integers(self.n))
        grad = self.components[i].grad(self.x)
        self.grad_evals += 1
        raw = self.x - self.eta * grad
        _check_finite(raw, self.x)
        self.x = _masked_soft_threshold(raw, self.eta * self.reg.lambda2, self.mask)


class ProxSAG:
    """Stored per-batch gradients, averaged step: x <- S_{lambda2/L}[x - y_avg/L]."""

    def __init__(self, components, reg, x0, lipschitz, seed=0, rng=None, defer_init=False):
        if lipschitz <= 0:
            raise ValueError("Lipschitz constant must be positive")
        self.components = components
        self.reg = reg
        self.n = len(components)
        self.x = np.array(x0, dtype=float)
        self.L = float(lipschitz)
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.mask = components[0].penalty_mask
        self.grad_evals = 0
        self._table = None
        if not defer_init:
            self.init_table(self.x)

    def init_table(self, x):
        """Full gradient pass seeding the stored-gradient table (n evaluations)."""
        self._table = [c.grad(x) for c in self.components]
        self.grad_evals += self.n
        self._avg = np.mean(self._table, axis=0)

    def step(self):
        i = int(self.rng.integers(self.n))
        grad = self.components[i].grad(self.x)
        self.grad_evals += 1
        self._avg = self._avg + (grad - self._table[i]) / self.n
        self._table[i] = grad
        raw = self.x - self._avg / self.L
        _check_finite(raw, self.x)
        self.x = _masked_soft_threshold(raw, self.reg.lambda2 / self.L, self.mask)

    @property
    def average_gradient(self):
        return self._avg


class Proxtone:
    """Proximal stochastic Newton-type descent on a piecewise-quadratic surrogate.

    hessian: "lbfgs" for dense BFGS rebuilds, or ("diagonal", scale) for the
    constant-diagonal variant. subspace_qmax > 0 switches to the shared
    low-dimensional subspace mode (mandatory above dense_cap dimensions).
    """

    def __init__(self, components, reg, x0, hessian="lbfgs", max_history=20,
                 sub_config=None, inexact=False, subspace_qmax=0,
                 subspace_gamma=1e-4, dense_cap=2000, seed=0, rng=None,
                 initial_hessians=None):
        self.components = components
        self.reg = reg
        self.n = len(components)
        self.p = components[0].p
        self.x = np.array(x0, dtype=float)
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.inexact = bool(inexact)
        self.hessian = hessian
        self.grad_evals = 0
        mask = components[0].penalty_mask
        if sub_config is None:
            sub_config = SubproblemConfig(penalty_mask=mask)
        elif sub_config.penalty_mask is None:
            sub_config = SubproblemConfig(
                max_iter=sub_config.max_iter, abstol=sub_config.abstol,
                lambda_init=sub_config.lambda_init, beta=sub_config.beta,
                penalty_mask=mask,
            )
        self.sub_config = sub_config
        self._use_subspace = subspace_qmax > 0
        if not self._use_subspace and self.p > dense_cap and hessian == "lbfgs":
            raise ValueError(
                f"dense BFGS mode is capped at p={dense_cap}; enable subspace mode"
            )

        self.history = CurvatureHistory(self.n, self.p, max_history=max_history)
        if self._use_subspace:
            if initial_hessians is not None:
                raise ValueError("initial_hessians is only supported in dense mode")
            self.subspace = SharedSubspace(self.p, subspace_qmax)
            self.surrogate = SubspaceSurrogate(
                components, self.x, self.subspace, gamma=subspace_gamma
            )
            for i in range(self.n):
                _, _, grad = self.surrogate.anchor(i)
                self.history.initialize(i, self.x, grad)
            self.grad_evals += self.n
        else:
            if initial_hessians is not None:
                if len(initial_hessians) != self.n:
                    raise ValueError("need one initial Hessian per component")
                h0 = list(initial_hessians)
            else:
                h0 = [self._initial_hessian() for _ in range(self.n)]
            self.surrogate = QuadraticSurrogate(components, self.x, h0)
            for i in range(self.n):
                _, _, grad = self.surrogate.anchor(i)
                self.history.initialize(i, self.x, grad)
            self.grad_evals += self.n
        self.not_converged_solves = 0

    def _initial_hessian(self):
        if self.hessian == "lbfgs":
            return constant_diagonal(self.p, 1.0)
        kind, scale = self.hessian
        if kind != "diagonal":
            raise ValueError(f"unknown hessian mode {self.hessian!r}")
        return constant_diagonal(self.p, scale)

    def _rebuild(self, i):
        if self._use_subspace:
            return bfgs_rebuild_subspace(
                self.history, i, self.subspace.basis, self.surrogate.gamma
            )
        if self.hessian == "lbfgs":
            return bfgs_rebuild(self.history, i)
        return self._initial_hessian()

    def step(self):
        solver = solve_lasso_inexact if self.inexact else solve_lasso
        info = {}
        x_new = solver(self.surrogate, self.reg, self.x, self.sub_config, info=info)
        if not info.get("converged", True):
            self.not_converged_solves += 1
        _check_finite(x_new, self.x)

        i = int(self.rng.integers(self.n))
        val, grad = self.components[i].value_grad(x_new)
        self.grad_evals += 1
        self.history.record(i, x_new, grad)
        if self._use_subspace:
            self.surrogate.observe([x_new, grad])
        h_new = self._rebuild(i)
        self.surrogate.replace_component(i, x_new, val, grad, h_new)
        self.x = x_new


class ProxtonePlus:
    """Inexact Proxtone for the first switch_epoch epochs, then ProxSAG.

    The SAG gradient table is seeded with a full pass at the switch iterate
    (n extra gradient evaluations, logged in grad_evals).
    """

    def __init__(self, components, reg, x0, switch_epoch, lipschitz, seed=0,
                 rng=None, **proxtone_kwargs):
        self.components = components
        self.reg = reg
        self.n = len(components)
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.switch_steps = int(switch_epoch) * self.n
        self.lipschitz = lipschitz
        self._steps = 0
        self._inner = None
        self._sag = None
        if self.switch_steps > 0:
            self._inner = Proxtone(
                components, reg, x0, inexact=True, rng=self.rng, **proxtone_kwargs
            )
        else:
            self._sag = ProxSAG(components, reg, x0, lipschitz, rng=self.rng)

    @property
    def x(self):
        return self._sag.x if self._sag is not None else self._inner.x

    @property
    def grad_evals(self):
        evals = 0
        if self._inner is not None:
            evals += self._inner.grad_evals
        if self._sag is not None:
            evals += self._sag.grad_evals
        return evals

    def step(self):
        if self._sag is None and self._steps >= self.switch_steps:
            self._sag = ProxSAG(
                self.components, self.reg, self._inner.x, self.lipschitz, rng=self.rng
            )
        if self._sag is not None:
            self._sag.step()
        else:
            self._inner.step()
        self._steps += 1


@dataclass
class TraceRow:
    epoch: int
    wall_seconds: float
    objective: float
    nnz: int
    sparsity_pct: float
    grad_evals: int


@dataclass
class RunTrace:
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    aborted: bool = False

    @property
    def final(self):
        return self.rows[-1]


def run(optimizer, components, reg, epochs, nnz_tau=0.0, trace_sink=None,
        metadata=None):
    """Execute epochs * n steps, recording one trace row per epoch (plus the
    initial row). Wall time covers the stepping loop only. Step errors abort
    the run and flag the partial trace."""
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    n = len(components)
    p = components[0].p
    trace = RunTrace(metadata=dict(metadata or {}))

    def emit(epoch, wall):
        x = optimizer.x
        row = TraceRow(
            epoch=epoch,
            wall_seconds=wall,
            objective=full_objective(components, reg, x),
            nnz=nnz(x, nnz_tau),
            sparsity_pct=100.0 * nnz(x, nnz_tau) / p,
            grad_evals=optimizer.grad_evals,
        )
        trace.rows.append(row)
        if trace_sink is not None:
            trace_sink(row)

    emit(0, 0.0)
    wall = 0.0
    for epoch in range(1, epochs + 1):
        t0 = time.perf_counter()
        try:
            for _ in range(n):
                optimizer.step()
        except (DivergedError, SubproblemError, FloatingPointError):
            trace.aborted = True
            wall += time.perf_counter() - t0
            emit(epoch, wall)
            return trace
        wall += time.perf_counter() - t0
        emit(epoch, wall)
    return trace
