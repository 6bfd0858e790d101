"""Piecewise-quadratic global surrogate with incremental aggregate refresh.

Each mini-batch i carries a quadratic model anchored where it was last sampled:

    g_i(x) ~ val_i + (x - anchor_i)^T grad_i + 1/2 (x - anchor_i)^T H_i (x - anchor_i)

stored in expanded polynomial form alpha_i + beta_i^T x + 1/2 x^T H_i x so the
aggregate G(x) = A + B^T x + 1/2 x^T H_agg x refreshes in O(one component) per
replacement. A full-space variant (dense or constant-diagonal Hessians) and a
shared low-dimensional subspace variant (damped low-rank Hessians) share the
same evaluation interface.
"""

import numpy as np

from .hessian import DenseHessian, ScaledIdentity, SubspaceHessian


class _Component:
    __slots__ = ("anchor", "val", "grad", "hess", "alpha", "beta")

    def __init__(self, anchor, val, grad, hess, hess_matvec):
        self.anchor = np.array(anchor, dtype=float)
        self.val = float(val)
        self.grad = np.array(grad, dtype=float)
        self.hess = hess
        ha = hess_matvec(self.anchor)
        self.beta = self.grad - ha
        self.alpha = self.val - float(self.grad @ self.anchor) + 0.5 * float(self.anchor @ ha)


class QuadraticSurrogate:
    """Full-space surrogate; Hessians are DenseHessian or ScaledIdentity."""

    def __init__(self, components, x0, h0_list):
        if len(components) != len(h0_list):
            raise ValueError("one initial Hessian per component required")
        self.n = len(components)
        self.p = components[0].p
        x0 = np.asarray(x0, dtype=float)
        self._diag_only = all(isinstance(h, ScaledIdentity) for h in h0_list)
        self._parts = []
        for comp, h in zip(components, h0_list):
            val, grad = comp.value_grad(x0)
            self._parts.append(_Component(x0, val, grad, h, h.matvec))
        self._rebuild_aggregates()

    def _rebuild_aggregates(self):
        self._alpha_sum = sum(c.alpha for c in self._parts)
        self._beta_sum = np.sum([c.beta for c in self._parts], axis=0)
        if self._diag_only:
            self._scale_sum = sum(c.hess.scale for c in self._parts)
            self._h_sum = None
        else:
            self._scale_sum = None
            self._h_sum = np.zeros((self.p, self.p))
            for c in self._parts:
                self._h_sum += c.hess.dense()

    def _agg_matvec(self, x):
        if self._diag_only:
            return (self._scale_sum / self.n) * x
        return self._h_sum @ x / self.n

    def replace_component(self, batch, x_new, val_new, grad_new, h_new):
        """Swap mini-batch `batch`'s model for one anchored at x_new; O(1) aggregate refresh."""
        x_new = np.asarray(x_new, dtype=float)
        if x_new.shape != (self.p,):
            raise ValueError("dimension mismatch")
        if self._diag_only and not isinstance(h_new, ScaledIdentity):
            self._diag_only = False
            self._rebuild_aggregates()
        old = self._parts[batch]
        new = _Component(x_new, val_new, grad_new, h_new, h_new.matvec)
        self._parts[batch] = new
        self._alpha_sum += new.alpha - old.alpha
        self._beta_sum = self._beta_sum + (new.beta - old.beta)
        if self._diag_only:
            self._scale_sum += new.hess.scale - old.hess.scale
        else:
            self._h_sum += new.hess.dense() - old.hess.dense()

    def value_grad(self, x):
        x = np.asarray(x, dtype=float)
        hx = self._agg_matvec(x)
        value = self._alpha_sum / self.n + float(self._beta_sum @ x) / self.n + 0.5 * float(x @ hx)
        grad = self._beta_sum / self.n + hx
        return value, grad

    def value(self, x):
        return self.value_grad(x)[0]

    def grad(self, x):
        return self.value_grad(x)[1]

    def component_value_grad(self, batch, x):
        """Evaluate one mini-batch's quadratic model (used by consistency checks)."""
        c = self._parts[batch]
        hx = c.hess.matvec(x)
        return c.alpha + float(c.beta @ x) + 0.5 * float(x @ hx), c.beta + hx

    def anchor(self, batch):
        c = self._parts[batch]
        return c.anchor, c.val, c.grad


class SharedSubspace:
    """Orthonormal basis Q grown one column per genuinely new observation."""

    def __init__(self, p, q_max, eps_expand=1e-8):
        if q_max < 1:
            raise ValueError("q_max must be >= 1")
        self.p = int(p)
        self.q_max = int(q_max)
        self.eps_expand = float(eps_expand)
        self.basis = np.zeros((p, 0))

    @property
    def q(self):
        return self.basis.shape[1]

    def _residual(self, v):
        r = v - self.basis @ (self.basis.T @ v)
        # second pass for numerical orthogonality
        r = r - self.basis @ (self.basis.T @ r)
        return r

    def needs_expand(self, v):
        v = np.asarray(v, dtype=float)
        r = self._residual(v)
        return float(np.linalg.norm(r)) > self.eps_expand * max(1.0, float(np.linalg.norm(v)))

    def project_expand(self, v):
        """Append the normalized residual of v as a new column if it is outside
        the current span and capacity allows. Returns True if a column was added."""
        v = np.asarray(v, dtype=float)
        if self.q >= self.q_max:
            return False
        r = self._residual(v)
        nr = float(np.linalg.norm(r))
        if nr <= self.eps_expand * max(1.0, float(np.linalg.norm(v))):
            return False
        self.basis = np.hstack([self.basis, (r / nr)[:, None]])
        return True

    def collapse(self, keep_vectors):
        """Rebuild the basis by orthonormalizing keep_vectors in order,
        dropping near-dependent ones; q <= q_max afterwards."""
        self.basis = np.zeros((self.p, 0))
        for v in keep_vectors:
            if self.q >= self.q_max:
                break
            self.project_expand(v)


class SubspaceSurrogate:
    """Surrogate with Hessians H_i = Q M_i Q^T + gamma I sharing one basis.

    Aggregate Hessian products cost O(p q); the prox stays in the original
    coordinates so thresholded solutions remain exactly sparse.
    """

    def __init__(self, components, x0, subspace, gamma=1e-4):
        if gamma < 0:
            raise ValueError("gamma must be nonnegative")
        self.n = len(components)
        self.p = components[0].p
        self.subspace = subspace
        self.gamma = float(gamma)
        x0 = np.asarray(x0, dtype=float)
        subspace.project_expand(x0)
        evals = [comp.value_grad(x0) for comp in components]
        for _, grad in evals:
            subspace.project_expand(grad)
        self._parts = []
        for val, grad in evals:
            h = SubspaceHessian(np.eye(subspace.q), self.gamma)
            self._parts.append(self._make_part(x0, val, grad, h))
        self._rebuild_aggregates()

    def _make_part(self, anchor, val, grad, hess):
        Q = self.subspace.basis
        return _Component(anchor, val, grad, hess, lambda v: hess.matvec_with_basis(Q, v))

    def _rebuild_aggregates(self):
        self._alpha_sum = sum(c.alpha for c in self._parts)
        self._beta_sum = np.sum([c.beta for c in self._parts], axis=0)
        q = self.subspace.q
        self._core_sum = np.zeros((q, q))
        for c in self._parts:
            self._core_sum += c.hess.core

    def _pad_cores(self):
        q = self.subspace.q
        for c in self._parts:
            k = c.hess.core.shape[0]
            if k < q:
                core = np.zeros((q, q))
                core[:k, :k] = c.hess.core
                c.hess.core = core
        k = self._core_sum.shape[0]
        if k < q:
            core = np.zeros((q, q))
            core[:k, :k] = self._core_sum
            self._core_sum = core

    def observe(self, vectors):
        """Grow the basis to cover new observations, collapsing first if full.

        Padding existing cores with zeros leaves every H_i operator unchanged,
        so alpha/beta stay valid.
        """
        pending = [np.asarray(v, dtype=float) for v in vectors]
        if any(self.subspace.needs_expand(v) for v in pending) and \
                self.subspace.q + 1 > self.subspace.q_max:
            self._collapse(pending)
        for v in pending:
            self.subspace.project_expand(v)
        self._pad_cores()

    def _collapse(self, pending):
        old_q = self.subspace.basis
        keep = list(pending)
        for c in self._parts:
            keep.append(c.anchor)
            keep.append(c.grad)
        self.subspace.collapse(keep)
        T = self.subspace.basis.T @ old_q
        for i, c in enumerate(self._parts):
            core = T @ c.hess.core @ T.T
            hess = SubspaceHessian(0.5 * (core + core.T), self.gamma)
            # anchors unchanged; alpha/beta must be recomputed for the new operator
            self._parts[i] = self._make_part(c.anchor, c.val, c.grad, hess)
        self._rebuild_aggregates()

    def replace_component(self, batch, x_new, val_new, grad_new, h_new):
        x_new = np.asarray(x_new, dtype=float)
        if h_new.core.shape[0] != self.subspace.q:
            raise ValueError("Hessian core does not match current subspace dimension")
        old = self._parts[batch]
        new = self._make_part(x_new, val_new, grad_new, h_new)
        self._parts[batch] = new
        self._alpha_sum += new.alpha - old.alpha
        self._beta_sum = self._beta_sum + (new.beta - old.beta)
        self._core_sum += new.hess.core - old.hess.core

    def _agg_matvec(self, x):
        Q = self.subspace.basis
        return Q @ ((self._core_sum / self.n) @ (Q.T @ x)) + self.gamma * x

    def value_grad(self, x):
        x = np.asarray(x, dtype=float)
        hx = self._agg_matvec(x)
        value = self._alpha_sum / self.n + float(self._beta_sum @ x) / self.n + 0.5 * float(x @ hx)
        grad = self._beta_sum / self.n + hx
        return value, grad

    def value(self, x):
        return self.value_grad(x)[0]

    def grad(self, x):
        return self.value_grad(x)[1]

    def component_value_grad(self, batch, x):
        c = self._parts[batch]
        hx = c.hess.matvec_with_basis(self.subspace.basis, x)
        return c.alpha + float(c.beta @ x) + 0.5 * float(x @ hx), c.beta + hx

    def anchor(self, batch):
        c = self._parts[batch]
        return c.anchor, c.val, c.grad
