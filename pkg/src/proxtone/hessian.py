"""Per-mini-batch curvature histories and BFGS Hessian rebuilds."""

from collections import deque

import numpy as np


class HessianApprox:
    """Symmetric positive definite approximation; see the concrete modes below."""

    mode = None

    def matvec(self, v):
        raise NotImplementedError

    def quad(self, x):
        """x^T H x."""
        return float(x @ self.matvec(x))

    def dense(self):
        raise NotImplementedError


class DenseHessian(HessianApprox):
    mode = "dense"

    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=float)
        self.p = self.matrix.shape[0]

    def matvec(self, v):
        return self.matrix @ v

    def dense(self):
        return self.matrix


class ScaledIdentity(HessianApprox):
    mode = "diagonal"

    def __init__(self, p, scale):
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.p = int(p)
        self.scale = float(scale)

    def matvec(self, v):
        return self.scale * v

    def quad(self, x):
        return self.scale * float(x @ x)

    def dense(self):
        return self.scale * np.eye(self.p)


class SubspaceHessian(HessianApprox):
    """Q M Q^T + gamma I with M a q x q symmetric PSD core in subspace coordinates."""

    mode = "subspace"

    def __init__(self, core, gamma):
        self.core = np.asarray(core, dtype=float)
        self.gamma = float(gamma)

    def matvec_with_basis(self, Q, v):
        return Q @ (self.core @ (Q.T @ v)) + self.gamma * v

    def dense_with_basis(self, Q):
        return Q @ self.core @ Q.T + self.gamma * np.eye(Q.shape[0])


class CurvatureHistory:
    """Ring buffers of (s, y) difference pairs per mini-batch, newest first."""

    def __init__(self, n_batches, p, max_history=20):
        if max_history < 1:
            raise ValueError("max_history must be >= 1")
        self.n = int(n_batches)
        self.p = int(p)
        self.max_history = int(max_history)
        self._s = [deque(maxlen=max_history) for _ in range(self.n)]
        self._y = [deque(maxlen=max_history) for _ in range(self.n)]
        self.last_x = [None] * self.n
        self.last_grad = [None] * self.n

    def initialize(self, batch, x0, grad0):
        self.last_x[batch] = np.array(x0, dtype=float)
        self.last_grad[batch] = np.array(grad0, dtype=float)

    def record(self, batch, x_new, grad_new):
        x_new = np.asarray(x_new, dtype=float)
        grad_new = np.asarray(grad_new, dtype=float)
        if x_new.shape != (self.p,) or grad_new.shape != (self.p,):
            raise ValueError("dimension mismatch in curvature observation")
        if self.last_x[batch] is None:
            raise ValueError(f"batch {batch} was never initialized")
        self._s[batch].append(x_new - self.last_x[batch])
        self._y[batch].append(grad_new - self.last_grad[batch])
        self.last_x[batch] = x_new.copy()
        self.last_grad[batch] = grad_new.copy()

    def pairs(self, batch):
        """(s, y) pairs from oldest to newest."""
        return list(zip(self._s[batch], self._y[batch]))

    def __len__(self):
        return self.n


def _bfgs_apply(B, pairs):
    """Apply the BFGS update for each pair (oldest first) that passes y^T s > 0.

    Returns the updated matrix and the number of skipped pairs.
    """
    skipped = 0
    for s, y in pairs:
        ys = float(y @ s)
        if ys > 0:
            Bs = B @ s
            sBs = float(s @ Bs)
            B = B - np.outer(Bs, Bs) / sBs + np.outer(y, y) / ys
        else:
            skipped += 1
    return 0.5 * (B + B.T), skipped


def bfgs_rebuild(history, batch):
    """Rebuild a dense Hessian approximation from identity over the stored pairs."""
    B, skipped = _bfgs_apply(np.eye(history.p), history.pairs(batch))
    approx = DenseHessian(B)
    approx.skipped_pairs = skipped
    return approx


def bfgs_rebuild_subspace(history, batch, basis, gamma):
    """BFGS in subspace coordinates: pairs projected through the basis, core from I_q."""
    q = basis.shape[1]
    projected = [(basis.T @ s, basis.T @ y) for s, y in history.pairs(batch)]
    core, skipped = _bfgs_apply(np.eye(q), projected)
    approx = SubspaceHessian(core, gamma)
    approx.skipped_pairs = skipped
    return approx


def constant_diagonal(p, scale):
    """H = scale * I (the constant-diagonal Hessian variant)."""
    return ScaledIdentity(p, scale)
